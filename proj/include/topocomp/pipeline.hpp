#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <tuple>
#include <span>
#include <vector>

#include "topocomp/codec.hpp"
#include "topocomp/errors.hpp"
#include "topocomp/metrics.hpp"
#include "topocomp/persistence.hpp"
#include "topocomp/quantize.hpp"
#include "topocomp/scalar_field.hpp"
#include "topocomp/simplify.hpp"

namespace topocomp {

/// Feature-size threshold, absolute or as a percentage of the field range.
struct EpsilonSpec {
  double amount = 5.0;
  bool is_percent = true;

  static EpsilonSpec percent(double p) { return {p, true}; }
  static EpsilonSpec absolute(double v) { return {v, false}; }

  double resolve(double range) const {
    return is_percent ? amount / 100.0 * range : amount;
  }
};

struct CompressOptions {
  EpsilonSpec epsilon;
  bool pointwise = false;           // refine intervals to width <= eps
  bool external_uq8 = false;        // attach an independent uq8 stream
  bool skip_simplification = false; // quantize the raw input directly
  bool source_f32 = false;          // original scalars were 32-bit
};

struct CompressStats {
  double eps_abs = 0.0;
  std::uint32_t n_c = 0;
  std::uint32_t n_i = 0;
  std::uint64_t raw_intervals = 0;
  std::uint64_t payload_bytes = 0;  // pre-backend payload size
  std::uint64_t archive_bytes = 0;
  double compression_rate = 0.0;
  std::size_t removed_count = 0;
  double removed_max_persistence = 0.0;
  double removed_sum_persistence = 0.0;
  // True when the simplified field realizes the filtered diagram value for
  // value. Flood-based simplification can shift a kept saddle by up to the
  // largest removed persistence when a removed basin straddles it; the
  // archive then stores the realized values instead.
  bool exact_preservation = true;
};

struct CompressResult {
  std::vector<std::uint8_t> archive;
  CompressStats stats;
};

namespace detail {

inline std::vector<std::pair<VertexId, std::uint8_t>> role_type_codes(
    const PersistenceDiagram& kept, int dimensionality) {
  std::map<VertexId, std::uint8_t> codes;
  auto set_code = [&codes](VertexId v, std::uint8_t code) {
    auto [it, inserted] = codes.emplace(v, code);
    if (!inserted) {
      // Extremum roles win over saddle roles; saddle roles agree otherwise.
      if (code == kTypeMinimum || code == kTypeMaximum) it->second = code;
    }
  };
  for (const auto& p : kept.pairs) {
    switch (p.pair_class) {
      case PairClass::MinSaddle:
        set_code(p.birth_vertex, kTypeMinimum);
        set_code(p.death_vertex, kTypeSaddle);
        break;
      case PairClass::SaddleMax:
        set_code(p.birth_vertex,
                 dimensionality == 3 ? kTypeSaddle2 : kTypeSaddle);
        set_code(p.death_vertex, kTypeMaximum);
        break;
      case PairClass::Essential:
        set_code(p.birth_vertex, kTypeMinimum);
        set_code(p.death_vertex, kTypeMaximum);
        break;
    }
  }
  return {codes.begin(), codes.end()};
}

inline std::vector<std::pair<VertexId, double>> critical_values_of(
    const PersistenceDiagram& kept) {
  std::map<VertexId, double> vals;
  for (const auto& p : kept.pairs) {
    vals.emplace(p.birth_vertex, p.birth_value);
    vals.emplace(p.death_vertex, p.death_value);
  }
  return {vals.begin(), vals.end()};
}

inline ConstraintSet constraints_from_index(const TopologicalIndex& index) {
  ConstraintSet c;
  for (const auto& e : index.entries) {
    if (e.type_code == kTypeMinimum) c.minima.push_back(e.vertex);
    if (e.type_code == kTypeMaximum) c.maxima.push_back(e.vertex);
  }
  std::sort(c.minima.begin(), c.minima.end());
  std::sort(c.maxima.begin(), c.maxima.end());
  return c;
}

}  // namespace detail

/// Clamps decoded values into the interval each vertex projects to and
/// restores exact values at critical vertices.
inline std::vector<double> crop_to_intervals(std::vector<double> values,
                                             const QuantizedField& q) {
  if (values.size() != q.vertex_count())
    throw FieldError("value array does not match the quantized field");
  for (VertexId v = 0; v < values.size(); ++v) {
    double cv;
    if (q.is_critical(v, &cv)) {
      values[v] = cv;
    } else {
      const auto [lo, hi] = q.interval_bounds(v);
      values[v] = std::clamp(values[v], lo, hi);
    }
  }
  return values;
}

/// Full compression pipeline: diagram, threshold filter, simplification,
/// adaptive quantization, encoding. With `skip_simplification` the raw input
/// is quantized against the kept critical values directly; decompression
/// output is unchanged, only the rate suffers.
inline CompressResult compress(const ScalarField& f,
                               const CompressOptions& opts) {
  const VertexOrder order = build_order(f);
  const PersistenceDiagram diagram = compute_diagram(f, order);
  const double range = diagram.field_range.second - diagram.field_range.first;
  const double eps = opts.epsilon.resolve(range);
  if (eps < 0.0) throw FieldError("persistence threshold must be >= 0");

  FilterResult filtered = filter_diagram(diagram, eps);
  const ConstraintSet constraints = constraints_from_diagram(filtered.kept);

  ScalarField fprime;
  const ScalarField* fp = &f;
  if (!opts.skip_simplification) {
    fprime = simplify(f, constraints);
    fp = &fprime;
  }
  const VertexOrder fp_order =
      opts.skip_simplification ? order : build_order(*fp);

  // The diagram the archive describes: identical to the filtered diagram
  // except where flooding had to shift a kept saddle value.
  PersistenceDiagram realized = opts.skip_simplification
                                    ? filtered.kept
                                    : compute_diagram(*fp, fp_order);
  bool exact = true;
  {
    auto key = [](const PersistencePair& p) {
      return std::tuple(int(p.pair_class), p.birth_value, p.death_value);
    };
    if (realized.pairs.size() != filtered.kept.pairs.size())
      throw InternalError("simplified field has an unexpected pair count");
    for (std::size_t i = 0; i < realized.pairs.size(); ++i)
      exact = exact && key(realized.pairs[i]) == key(filtered.kept.pairs[i]);
  }

  IntervalPartition partition = build_partition(realized, opts.pointwise, eps);
  std::vector<std::pair<VertexId, double>> criticals =
      detail::critical_values_of(realized);
  for (const auto& [v, value] : criticals) {
    if (fp->values[v] != value)
      throw InternalError("indexed critical value does not match the field");
  }

  QuantizedField q = quantize(*fp, partition, std::move(criticals));
  const TopologicalIndex index = build_index(
      q, detail::role_type_codes(realized, f.dimensionality()), fp_order);

  std::uint8_t flags = 0;
  if (opts.pointwise) flags |= kFlagPointwise;
  if (opts.external_uq8) flags |= kFlagExternalStream;
  if (opts.source_f32) flags |= kFlagSourceF32;

  std::optional<std::vector<std::uint8_t>> external;
  if (opts.external_uq8)
    external = external_codec_by_name("uq8")->compress_field(f);

  CompressResult result;
  result.archive =
      encode(q, index, eps, flags, external ? &*external : nullptr);

  CompressStats& s = result.stats;
  s.eps_abs = eps;
  s.n_c = std::uint32_t(index.entries.size());
  s.n_i = q.interval_count();
  s.raw_intervals = q.bounds.size() > 1 ? q.bounds.size() - 1 : 0;
  const std::uint64_t n_links =
      std::count_if(index.entries.begin(), index.entries.end(),
                    [](const TopoIndexEntry& e) {
                      return e.interval_link.has_value();
                    });
  s.payload_bytes =
      archive_size(f.vertex_count(), s.n_c, s.n_i, s.raw_intervals, n_links,
                   external.has_value(), external ? external->size() : 0)
          .payload_bytes;
  s.archive_bytes = result.archive.size();
  const double source_bytes =
      double(f.vertex_count()) * (opts.source_f32 ? 4.0 : 8.0);
  s.compression_rate = source_bytes / double(result.archive.size());
  s.removed_count = filtered.removed.size();
  for (const auto& p : filtered.removed) {
    s.removed_max_persistence =
        std::max(s.removed_max_persistence, p.persistence());
    s.removed_sum_persistence += p.persistence();
  }
  s.exact_preservation = exact;
  return result;
}

inline CompressResult compress_skip_simplification(const ScalarField& f,
                                                   CompressOptions opts) {
  opts.skip_simplification = true;
  return compress(f, opts);
}

/// Decompression: decode, rebuild the quantized value view (or crop the
/// external stream into its intervals), then reconstruct offsets and remove
/// any feature not recorded in the topological index. Reconstruction always
/// runs; it is idempotent when nothing needs fixing.
inline ScalarField decompress(std::span<const std::uint8_t> bytes) {
  const DecodeResult dr = decode(bytes);
  const std::uint64_t n_v = dr.quantized.vertex_count();

  std::vector<double> values(n_v);
  for (VertexId v = 0; v < n_v; ++v) values[v] = dr.quantized.value_at(v);

  if (dr.header.flags & kFlagExternalStream) {
    const ExternalCodec* codec = external_codec_by_name("uq8");
    values = crop_to_intervals(
        codec->decompress_field(dr.external_stream, dr.header.dims),
        dr.quantized);
  }

  ScalarField g0 = build_field(dr.header.dims, std::move(values));
  if (dr.header.flags & kFlagBaseline) return g0;

  const ConstraintSet constraints = detail::constraints_from_index(dr.index);
  return simplify(g0, constraints);
}

/// Uniform-step range quantization baseline sharing the archive container:
/// the range is split into equal intervals no wider than eps and every
/// vertex snaps to its interval mid-value, so max error is eps/2.
inline std::vector<std::uint8_t> sq_r_compress(const ScalarField& f,
                                               double eps_abs,
                                               bool source_f32 = false) {
  if (!(eps_abs > 0.0)) throw FieldError("step width must be positive");
  const VertexOrder order = build_order(f);
  const VertexId lo_v = order.sorted.front();
  const VertexId hi_v = order.sorted.back();

  std::vector<double> base{f.values[lo_v]};
  if (f.values[hi_v] != f.values[lo_v]) base.push_back(f.values[hi_v]);

  IntervalPartition partition;
  partition.bounds = subdivide_bounds(base, eps_abs);

  std::vector<std::pair<VertexId, double>> criticals{
      {lo_v, f.values[lo_v]}, {hi_v, f.values[hi_v]}};
  std::sort(criticals.begin(), criticals.end());
  QuantizedField q = quantize(f, partition, std::move(criticals));

  std::vector<std::pair<VertexId, std::uint8_t>> types{
      {lo_v, kTypeMinimum}, {hi_v, kTypeMaximum}};
  std::sort(types.begin(), types.end());
  const TopologicalIndex index = build_index(q, types, order);

  std::uint8_t flags = kFlagPointwise | kFlagBaseline;
  if (source_f32) flags |= kFlagSourceF32;
  return encode(q, index, eps_abs, flags);
}

inline ScalarField sq_r_decompress(std::span<const std::uint8_t> bytes) {
  const ArchiveHeader h = parse_header(bytes);
  if (!(h.flags & kFlagBaseline))
    throw ArchiveError(ArchiveError::Kind::InvalidInput,
                       "not a baseline archive");
  return decompress(bytes);
}

}  // namespace topocomp
