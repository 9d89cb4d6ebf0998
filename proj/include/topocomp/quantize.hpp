#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "topocomp/errors.hpp"
#include "topocomp/persistence.hpp"
#include "topocomp/scalar_field.hpp"

namespace topocomp {

/// Range partition delimited by the critical values of the field being
/// quantized, optionally refined so no interval exceeds a maximum width.
/// `nonempty_raw` lists the raw intervals that received at least one regular
/// vertex (filled by quantize); compact interval ids follow its order.
struct IntervalPartition {
  std::vector<double> bounds;            // strictly increasing
  std::vector<std::uint32_t> nonempty_raw;  // sorted raw interval indices

  std::size_t raw_interval_count() const {
    return bounds.size() > 1 ? bounds.size() - 1 : 0;
  }
};

/// Splits every gap wider than `max_width` into equal parts. Used both when
/// building a partition and when a decoder re-derives it, so the arithmetic
/// here is the single source of truth for the refined bound values.
inline std::vector<double> subdivide_bounds(const std::vector<double>& base,
                                            double max_width) {
  std::vector<double> out;
  out.reserve(base.size());
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    const double a = base[i], b = base[i + 1];
    out.push_back(a);
    const double gap = b - a;
    if (gap > max_width) {
      const auto m = std::uint64_t(std::ceil(gap / max_width));
      const double step = gap / double(m);
      for (std::uint64_t k = 1; k < m; ++k) {
        const double t = a + double(k) * step;
        if (t > out.back() && t < b) out.push_back(t);
      }
    }
  }
  if (!base.empty()) out.push_back(base.back());
  return out;
}

/// Interval bounds from the critical values of a diagram. With pointwise
/// control on, gaps wider than eps are uniformly subdivided so every
/// interval has width at most eps.
inline IntervalPartition build_partition(const PersistenceDiagram& d,
                                         bool pointwise, double eps) {
  if (d.pairs.empty()) throw FieldError("cannot partition an empty diagram");
  if (pointwise && !(eps > 0.0))
    throw FieldError("pointwise control requires eps > 0");
  std::vector<double> vals;
  vals.reserve(d.pairs.size() * 2);
  for (const auto& p : d.pairs) {
    vals.push_back(p.birth_value);
    vals.push_back(p.death_value);
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  IntervalPartition part;
  part.bounds = pointwise ? subdivide_bounds(vals, eps) : std::move(vals);
  return part;
}

/// Field quantized against a partition: regular vertices carry the compact
/// id of their interval, critical vertices keep their exact value. The
/// derived value view is the interval mid-value for regular vertices.
struct QuantizedField {
  Dims3 dims{1, 1, 1};
  std::vector<std::uint32_t> interval_id;  // compact id per vertex (0 for criticals)
  std::vector<std::pair<VertexId, double>> critical_assignments;  // sorted by vertex
  std::vector<double> bounds;
  std::vector<std::uint32_t> nonempty_raw;

  std::size_t vertex_count() const { return interval_id.size(); }
  std::uint32_t interval_count() const {
    return std::uint32_t(nonempty_raw.size());
  }

  bool is_critical(VertexId v, double* value = nullptr) const {
    auto it = std::lower_bound(
        critical_assignments.begin(), critical_assignments.end(), v,
        [](const std::pair<VertexId, double>& a, VertexId b) {
          return a.first < b;
        });
    if (it == critical_assignments.end() || it->first != v) return false;
    if (value) *value = it->second;
    return true;
  }

  double mid_value(std::uint32_t compact_id) const {
    const std::uint32_t raw = nonempty_raw.at(compact_id);
    return 0.5 * (bounds[raw] + bounds[raw + 1]);
  }

  // Closed bounds of the interval a regular vertex projects to. For the
  // degenerate single-value partition both ends coincide.
  std::pair<double, double> interval_bounds(VertexId v) const {
    if (bounds.size() < 2) return {bounds.at(0), bounds.at(0)};
    const std::uint32_t raw = nonempty_raw.at(interval_id[v]);
    return {bounds[raw], bounds[raw + 1]};
  }

  double value_at(VertexId v) const {
    double cv;
    if (is_critical(v, &cv)) return cv;
    if (bounds.size() < 2) return bounds.at(0);
    return mid_value(interval_id[v]);
  }

  bool operator==(const QuantizedField& o) const {
    return dims == o.dims && interval_id == o.interval_id &&
           critical_assignments == o.critical_assignments &&
           bounds == o.bounds && nonempty_raw == o.nonempty_raw;
  }
};

/// Quantizes a field. `criticals` lists the vertices whose exact values must
/// survive (each value must be one of the partition bounds). A regular
/// vertex whose value ties a critical bound sits there because a flood
/// carried it onto that critical vertex; it is assigned the interval on the
/// far side of its order relation (above the critical vertex in the total
/// order -> interval below, and vice versa), so that reconstruction after
/// decoding settles it back onto the exact critical value no matter whether
/// the flood ran before quantization or only at decompression. Equality
/// with a refinement bound assigns the interval above.
inline QuantizedField quantize(const ScalarField& f, IntervalPartition& part,
                               std::vector<std::pair<VertexId, double>> criticals) {
  const std::size_t n = f.vertex_count();
  const VertexOrder order = build_order(f);
  std::sort(criticals.begin(), criticals.end());

  std::vector<std::uint8_t> is_crit(n, 0);
  for (const auto& [v, val] : criticals) {
    if (v >= n) throw FieldError("critical vertex out of range");
    if (f.values[v] != val)
      throw InternalError("critical value does not match the field");
    is_crit[v] = 1;
  }

  const std::vector<double>& bounds = part.bounds;
  if (bounds.empty()) throw FieldError("partition has no bounds");
  const std::size_t n_raw = part.raw_interval_count();

  // Lowest-order critical vertex sitting at each bound value, when any.
  std::vector<std::uint32_t> bound_rank(bounds.size(), 0xFFFFFFFFu);
  for (const auto& [v, val] : criticals) {
    const auto it = std::lower_bound(bounds.begin(), bounds.end(), val);
    if (it != bounds.end() && *it == val) {
      const auto bi = std::size_t(it - bounds.begin());
      bound_rank[bi] = std::min(bound_rank[bi], order.rank[v]);
    }
  }

  std::vector<std::uint32_t> raw_id(n, 0);
  std::vector<std::uint8_t> raw_used(n_raw, 0);
  for (VertexId v = 0; v < n; ++v) {
    if (is_crit[v]) continue;
    const double val = f.values[v];
    if (val < bounds.front() || val > bounds.back())
      throw FieldError("vertex value outside the partition range");
    if (n_raw == 0) continue;  // single-value partition
    auto it = std::upper_bound(bounds.begin(), bounds.end(), val);
    std::int64_t idx = (it - bounds.begin()) - 1;  // bounds[idx] <= val
    if (bounds[idx] == val) {
      if (bound_rank[idx] != 0xFFFFFFFFu && order.rank[v] > bound_rank[idx])
        --idx;  // above the critical vertex in the total order
    }
    idx = std::clamp<std::int64_t>(idx, 0, std::int64_t(n_raw) - 1);
    raw_id[v] = std::uint32_t(idx);
    raw_used[idx] = 1;
  }

  part.nonempty_raw.clear();
  std::vector<std::uint32_t> compact_of_raw(n_raw, 0xFFFFFFFFu);
  for (std::size_t i = 0; i < n_raw; ++i) {
    if (raw_used[i]) {
      compact_of_raw[i] = std::uint32_t(part.nonempty_raw.size());
      part.nonempty_raw.push_back(std::uint32_t(i));
    }
  }

  QuantizedField q;
  q.dims = f.dims;
  q.interval_id.assign(n, 0);
  for (VertexId v = 0; v < n; ++v)
    if (!is_crit[v] && n_raw > 0) q.interval_id[v] = compact_of_raw[raw_id[v]];
  q.critical_assignments = std::move(criticals);
  q.bounds = bounds;
  q.nonempty_raw = part.nonempty_raw;
  return q;
}

/// Materializes the quantized value view as a field, keeping the supplied
/// offsets (by default the identity).
inline ScalarField quantized_to_field(const QuantizedField& q,
                                      std::vector<VertexId> offsets = {}) {
  std::vector<double> vals(q.vertex_count());
  for (VertexId v = 0; v < q.vertex_count(); ++v) vals[v] = q.value_at(v);
  return build_field(q.dims, std::move(vals), std::move(offsets));
}

}  // namespace topocomp
