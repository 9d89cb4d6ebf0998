#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "topocomp/errors.hpp"
#include "topocomp/persistence.hpp"
#include "topocomp/scalar_field.hpp"

namespace topocomp {

/// Extrema that simplification must keep. Everything else is flooded away.
struct ConstraintSet {
  std::vector<VertexId> minima;  // sorted
  std::vector<VertexId> maxima;  // sorted

  bool has_minimum(VertexId v) const {
    return std::binary_search(minima.begin(), minima.end(), v);
  }
  bool has_maximum(VertexId v) const {
    return std::binary_search(maxima.begin(), maxima.end(), v);
  }
};

inline ConstraintSet constraints_from_diagram(const PersistenceDiagram& d) {
  ConstraintSet c;
  for (const auto& p : d.pairs) {
    switch (p.pair_class) {
      case PairClass::MinSaddle: c.minima.push_back(p.birth_vertex); break;
      case PairClass::SaddleMax: c.maxima.push_back(p.death_vertex); break;
      case PairClass::Essential:
        c.minima.push_back(p.birth_vertex);
        c.maxima.push_back(p.death_vertex);
        break;
    }
  }
  std::sort(c.minima.begin(), c.minima.end());
  c.minima.erase(std::unique(c.minima.begin(), c.minima.end()), c.minima.end());
  std::sort(c.maxima.begin(), c.maxima.end());
  c.maxima.erase(std::unique(c.maxima.begin(), c.maxima.end()), c.maxima.end());
  return c;
}

namespace detail {

// One monotone flooding pass. Components of the growing level set are
// tracked with union-find plus concatenable member lists. When a component
// with an unauthorized extremum dies at a merge vertex s, its members are
// scheduled to take the value of s. After the sweep each flooded group is
// re-inserted into the total order directly next to its final merge vertex
// (after it in the ascending pass, before it in the descending pass), inner
// positions by breadth-first depth from s so the plateau drains at s only.
//
// Returns true if anything was flooded. `sorted`, `rank` and `values` are
// updated in place.
inline bool flood_pass(const ScalarField& grid, std::vector<double>& values,
                       std::vector<VertexId>& sorted,
                       std::vector<std::uint32_t>& rank,
                       const std::vector<std::uint8_t>& preserved,
                       bool ascending) {
  const std::size_t n = values.size();
  std::vector<VertexId> parent(n, kInvalidVertex);
  std::vector<VertexId> ext(n, kInvalidVertex);
  std::vector<std::uint8_t> has_pres(n, 0);
  std::vector<VertexId> head(n, kInvalidVertex), tail(n, kInvalidVertex);
  std::vector<VertexId> next(n, kInvalidVertex);
  std::vector<VertexId> pending(n, kInvalidVertex);

  auto find = [&](VertexId v) {
    VertexId root = v;
    while (parent[root] != root) root = parent[root];
    while (parent[v] != root) {
      const VertexId t = parent[v];
      parent[v] = root;
      v = t;
    }
    return root;
  };

  std::array<VertexId, 14> nbr;
  std::array<VertexId, 14> roots;
  bool flooded_any = false;

  for (std::size_t step = 0; step < n; ++step) {
    const std::uint32_t r =
        ascending ? std::uint32_t(step) : std::uint32_t(n - 1 - step);
    const VertexId v = sorted[r];
    const int nn = link_neighbors(grid, v, nbr);
    int nroots = 0;
    for (int i = 0; i < nn; ++i) {
      const VertexId u = nbr[i];
      const bool processed = ascending ? rank[u] < r : rank[u] > r;
      if (!processed) continue;
      const VertexId root = find(u);
      bool known = false;
      for (int j = 0; j < nroots; ++j)
        if (roots[j] == root) { known = true; break; }
      if (!known) roots[nroots++] = root;
    }

    if (nroots == 0) {
      parent[v] = v;
      ext[v] = v;
      has_pres[v] = preserved[v];
      head[v] = tail[v] = v;
      next[v] = kInvalidVertex;
      continue;
    }

    auto age = [&](VertexId root) {
      const std::uint32_t rr = rank[ext[root]];
      return ascending ? rr : std::uint32_t(n - 1) - rr;
    };
    VertexId survivor = roots[0];
    for (int j = 1; j < nroots; ++j) {
      const VertexId cand = roots[j];
      if (has_pres[cand] != has_pres[survivor]) {
        if (has_pres[cand]) survivor = cand;
      } else if (age(cand) < age(survivor)) {
        survivor = cand;
      }
    }

    for (int j = 0; j < nroots; ++j) {
      const VertexId dying = roots[j];
      if (dying == survivor) continue;
      if (!has_pres[dying]) {
        for (VertexId u = head[dying]; u != kInvalidVertex; u = next[u])
          pending[u] = v;
        flooded_any = true;
      }
      parent[dying] = survivor;
      next[tail[survivor]] = head[dying];
      tail[survivor] = tail[dying];
    }
    parent[v] = survivor;
    next[tail[survivor]] = v;
    tail[survivor] = v;
    next[v] = kInvalidVertex;
  }

  if (!flooded_any) return false;

  // Depth of each flooded vertex from its final merge vertex.
  std::vector<VertexId> flooded;
  for (VertexId v = 0; v < n; ++v)
    if (pending[v] != kInvalidVertex) flooded.push_back(VertexId(v));
  std::sort(flooded.begin(), flooded.end(), [&](VertexId a, VertexId b) {
    if (pending[a] != pending[b]) return pending[a] < pending[b];
    return rank[a] < rank[b];
  });

  std::vector<std::uint32_t> depth(n, 0);
  std::vector<std::uint8_t> mark(n, 0);  // 1 = in current group, 2 = visited
  std::vector<VertexId> queue;
  for (std::size_t lo = 0; lo < flooded.size();) {
    std::size_t hi = lo;
    const VertexId s = pending[flooded[lo]];
    while (hi < flooded.size() && pending[flooded[hi]] == s) ++hi;
    if (pending[s] != kInvalidVertex)
      throw InternalError("flood merge vertex scheduled for flooding");
    for (std::size_t i = lo; i < hi; ++i) mark[flooded[i]] = 1;

    queue.clear();
    const int nn = link_neighbors(grid, s, nbr);
    for (int i = 0; i < nn; ++i) {
      if (mark[nbr[i]] == 1) {
        mark[nbr[i]] = 2;
        depth[nbr[i]] = 1;
        queue.push_back(nbr[i]);
      }
    }
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const VertexId cur = queue[q];
      std::array<VertexId, 14> cn;
      const int cc = link_neighbors(grid, cur, cn);
      for (int i = 0; i < cc; ++i) {
        if (mark[cn[i]] == 1) {
          mark[cn[i]] = 2;
          depth[cn[i]] = depth[cur] + 1;
          queue.push_back(cn[i]);
        }
      }
    }
    for (std::size_t i = lo; i < hi; ++i) {
      if (mark[flooded[i]] != 2)
        throw InternalError("flooded region not connected to its merge vertex");
      mark[flooded[i]] = 0;
    }
    lo = hi;
  }

  for (VertexId v : flooded) values[v] = values[pending[v]];

  // Splice flooded groups next to their merge vertices.
  struct Key {
    std::uint32_t anchor;
    std::int8_t tier;
    std::int64_t a;
    std::uint32_t b;
  };
  std::vector<Key> key(n);
  for (VertexId v = 0; v < n; ++v) {
    if (pending[v] == kInvalidVertex) {
      key[v] = {rank[v], 0, 0, 0};
    } else if (ascending) {
      key[v] = {rank[pending[v]], 1, std::int64_t(depth[v]), rank[v]};
    } else {
      key[v] = {rank[pending[v]], -1, -std::int64_t(depth[v]), rank[v]};
    }
  }
  std::sort(sorted.begin(), sorted.end(), [&](VertexId x, VertexId y) {
    const Key &kx = key[x], &ky = key[y];
    if (kx.anchor != ky.anchor) return kx.anchor < ky.anchor;
    if (kx.tier != ky.tier) return kx.tier < ky.tier;
    if (kx.a != ky.a) return kx.a < ky.a;
    return kx.b < ky.b;
  });
  for (std::uint32_t i = 0; i < n; ++i) rank[sorted[i]] = i;

  for (std::size_t i = 1; i < n; ++i) {
    if (values[sorted[i - 1]] > values[sorted[i]])
      throw InternalError("vertex order inconsistent after flooding");
  }
  return true;
}

}  // namespace detail

/// Reconstructs a field whose extrema are exactly the given constraints.
/// Unauthorized sub-level (sur-level) set components are raised (lowered)
/// to the value of the vertex where they merge into a surviving component,
/// and the offsets are rebuilt so each flooded plateau is monotone with a
/// single exit at that vertex. Passes repeat until a fixpoint.
inline ScalarField simplify(const ScalarField& f, const ConstraintSet& c) {
  const std::size_t n = f.vertex_count();
  if (c.minima.empty() || c.maxima.empty())
    throw ConstraintError("constraint set needs at least one minimum and one maximum");
  for (VertexId v : c.minima)
    if (v >= n) throw ConstraintError("constraint vertex out of range");
  for (VertexId v : c.maxima)
    if (v >= n) throw ConstraintError("constraint vertex out of range");

  std::vector<double> values = f.values;

  std::vector<std::uint8_t> pres_min(n, 0), pres_max(n, 0);
  for (VertexId v : c.minima) pres_min[v] = 1;
  for (VertexId v : c.maxima) {
    if (pres_min[v])
      throw ConstraintError("vertex constrained as both minimum and maximum");
    pres_max[v] = 1;
  }

  // Initial order: constrained extrema win value ties (minima sort first
  // among equals, maxima last), otherwise ties fall back to the offsets.
  // Plateaus can only expose a constrained vertex as an extremum if the
  // order puts it at the right end of its plateau.
  VertexOrder order;
  order.sorted.resize(n);
  std::iota(order.sorted.begin(), order.sorted.end(), VertexId(0));
  auto tie_class = [&](VertexId v) { return pres_min[v] ? 0 : (pres_max[v] ? 2 : 1); };
  std::sort(order.sorted.begin(), order.sorted.end(),
            [&](VertexId a, VertexId b) {
              if (f.values[a] != f.values[b]) return f.values[a] < f.values[b];
              if (tie_class(a) != tie_class(b)) return tie_class(a) < tie_class(b);
              return f.offsets[a] < f.offsets[b];
            });
  order.rank.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) order.rank[order.sorted[r]] = r;

  // Converges in one or two pass pairs on everything observed; the cap only
  // guards against unattainable constraint sets.
  std::size_t passes = 0;
  for (;;) {
    const bool fa = detail::flood_pass(f, values, order.sorted, order.rank,
                                       pres_min, true);
    const bool fb = detail::flood_pass(f, values, order.sorted, order.rank,
                                       pres_max, false);
    if (!fa && !fb) break;
    if (++passes > 100)
      throw ConstraintError("simplification did not converge; constraint set not attainable");
  }

  ScalarField out;
  out.dims = f.dims;
  out.values = std::move(values);
  out.offsets.resize(n);
  for (VertexId v = 0; v < n; ++v) out.offsets[v] = order.rank[v];

  // The constraints must now be exactly the extrema of the result.
  for (VertexId v = 0; v < n; ++v) {
    const CriticalType t = classify_vertex(out, order, VertexId(v));
    const bool is_min = t == CriticalType::Minimum;
    const bool is_max = t == CriticalType::Maximum;
    if (is_min != bool(pres_min[v]))
      throw ConstraintError("minimum constraint not attainable at vertex " +
                            std::to_string(v));
    if (is_max != bool(pres_max[v]))
      throw ConstraintError("maximum constraint not attainable at vertex " +
                            std::to_string(v));
  }
  for (VertexId v : c.minima)
    if (out.values[v] != f.values[v])
      throw InternalError("preserved minimum moved during simplification");
  for (VertexId v : c.maxima)
    if (out.values[v] != f.values[v])
      throw InternalError("preserved maximum moved during simplification");
  return out;
}

/// Offset-only variant used where values are already consistent with the
/// constraints up to flat plateaus (after quantization). Any value change
/// indicates a precondition violation.
inline ScalarField rebuild_offsets(const ScalarField& f, const ConstraintSet& c) {
  ScalarField out = simplify(f, c);
  for (std::size_t v = 0; v < f.vertex_count(); ++v) {
    if (out.values[v] != f.values[v])
      throw FieldError("field values are not consistent with the constraints");
  }
  return out;
}

}  // namespace topocomp
