#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

#include "topocomp/errors.hpp"
#include "topocomp/scalar_field.hpp"

namespace topocomp {

enum class PairClass : std::uint8_t { MinSaddle, SaddleMax, Essential };

inline const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::MinSaddle: return "min_saddle";
    case PairClass::SaddleMax: return "saddle_max";
    case PairClass::Essential: return "essential";
  }
  return "?";
}

struct PersistencePair {
  VertexId birth_vertex = kInvalidVertex;
  VertexId death_vertex = kInvalidVertex;
  double birth_value = 0.0;
  double death_value = 0.0;
  PairClass pair_class = PairClass::Essential;

  double persistence() const { return death_value - birth_value; }
};

struct PersistenceDiagram {
  std::vector<PersistencePair> pairs;
  std::pair<double, double> field_range{0.0, 0.0};

  const PersistencePair& essential() const {
    for (const auto& p : pairs)
      if (p.pair_class == PairClass::Essential) return p;
    throw InternalError("diagram has no essential pair");
  }
};

namespace detail {

struct UnionFind {
  std::vector<VertexId> parent;

  explicit UnionFind(std::size_t n) : parent(n, kInvalidVertex) {}

  bool contains(VertexId v) const { return parent[v] != kInvalidVertex; }

  void make(VertexId v) { parent[v] = v; }

  VertexId find(VertexId v) {
    VertexId root = v;
    while (parent[root] != root) root = parent[root];
    while (parent[v] != root) {
      const VertexId next = parent[v];
      parent[v] = root;
      v = next;
    }
    return root;
  }

  // Attaches the tree of `child` under `root`.
  void merge_into(VertexId child, VertexId root) { parent[child] = root; }
};

// One monotone union-find sweep. `ascending` tracks sub-level set components
// (emitting minimum/saddle pairs); the descending sweep tracks sur-level set
// components (emitting saddle/maximum pairs). At each merge event the
// component whose extremum is youngest in sweep order dies, one pair per
// dying component, deaths ordered by the dying extremum's position.
inline void sweep_pairs(const ScalarField& f, const VertexOrder& order,
                        bool ascending, std::vector<PersistencePair>& out) {
  const std::size_t n = f.vertex_count();
  UnionFind uf(n);
  std::vector<VertexId> comp_extremum(n, kInvalidVertex);
  std::array<VertexId, 14> nbr;
  std::array<VertexId, 14> roots;

  for (std::size_t step = 0; step < n; ++step) {
    const std::uint32_t r =
        ascending ? std::uint32_t(step) : std::uint32_t(n - 1 - step);
    const VertexId v = order.sorted[r];
    const int nn = link_neighbors(f, v, nbr);
    int nroots = 0;
    for (int i = 0; i < nn; ++i) {
      const VertexId u = nbr[i];
      const bool processed =
          ascending ? order.rank[u] < r : order.rank[u] > r;
      if (!processed) continue;
      const VertexId root = uf.find(u);
      bool known = false;
      for (int j = 0; j < nroots; ++j)
        if (roots[j] == root) { known = true; break; }
      if (!known) roots[nroots++] = root;
    }

    if (nroots == 0) {
      uf.make(v);
      comp_extremum[v] = v;
      continue;
    }

    // Survivor: the component whose extremum was seen first in sweep order.
    auto age = [&](VertexId root) {
      const std::uint32_t rr = order.rank[comp_extremum[root]];
      return ascending ? rr : std::uint32_t(n - 1) - rr;
    };
    VertexId survivor = roots[0];
    for (int j = 1; j < nroots; ++j)
      if (age(roots[j]) < age(survivor)) survivor = roots[j];

    std::sort(roots.begin(), roots.begin() + nroots,
              [&](VertexId a, VertexId b) { return age(a) < age(b); });
    for (int j = 0; j < nroots; ++j) {
      const VertexId dying = roots[j];
      if (dying == survivor) continue;
      const VertexId e = comp_extremum[dying];
      PersistencePair p;
      if (ascending) {
        p.birth_vertex = e;
        p.death_vertex = v;
        p.birth_value = f.values[e];
        p.death_value = f.values[v];
        p.pair_class = PairClass::MinSaddle;
      } else {
        p.birth_vertex = v;
        p.death_vertex = e;
        p.birth_value = f.values[v];
        p.death_value = f.values[e];
        p.pair_class = PairClass::SaddleMax;
      }
      out.push_back(p);
      uf.merge_into(dying, survivor);
    }
    uf.make(v);
    uf.merge_into(v, survivor);
  }
}

inline void sort_pairs(std::vector<PersistencePair>& pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const PersistencePair& a, const PersistencePair& b) {
              return std::make_tuple(int(a.pair_class), a.birth_value,
                                     a.death_value, a.birth_vertex,
                                     a.death_vertex) <
                     std::make_tuple(int(b.pair_class), b.birth_value,
                                     b.death_value, b.birth_vertex,
                                     b.death_vertex);
            });
}

}  // namespace detail

/// Persistence diagram restricted to component events: minimum/saddle pairs
/// from the ascending sweep, saddle/maximum pairs from the descending sweep,
/// plus the essential global minimum/maximum pair.
inline PersistenceDiagram compute_diagram(const ScalarField& f,
                                          const VertexOrder& order) {
  PersistenceDiagram d;
  detail::sweep_pairs(f, order, true, d.pairs);
  detail::sweep_pairs(f, order, false, d.pairs);

  const VertexId lo = order.sorted.front();
  const VertexId hi = order.sorted.back();
  PersistencePair essential;
  essential.birth_vertex = lo;
  essential.death_vertex = hi;
  essential.birth_value = f.values[lo];
  essential.death_value = f.values[hi];
  essential.pair_class = PairClass::Essential;
  d.pairs.push_back(essential);

  d.field_range = {f.values[lo], f.values[hi]};
  detail::sort_pairs(d.pairs);
  return d;
}

inline PersistenceDiagram compute_diagram(const ScalarField& f) {
  return compute_diagram(f, build_order(f));
}

namespace detail {

// Label-based sweep that maintains sub-/sur-level set components explicitly:
// every merge re-floods the united region from the merge vertex. Quadratic in
// the worst case; used as an independent oracle at small scale only.
inline void brute_sweep(const ScalarField& f, const VertexOrder& order,
                        bool ascending, std::vector<PersistencePair>& out) {
  const std::size_t n = f.vertex_count();
  std::vector<std::int32_t> label(n, -1);
  std::vector<VertexId> comp_extremum;
  std::array<VertexId, 14> nbr;

  for (std::size_t step = 0; step < n; ++step) {
    const std::uint32_t r =
        ascending ? std::uint32_t(step) : std::uint32_t(n - 1 - step);
    const VertexId v = order.sorted[r];
    const int nn = link_neighbors(f, v, nbr);
    std::vector<std::int32_t> seen;
    for (int i = 0; i < nn; ++i) {
      const VertexId u = nbr[i];
      const bool processed =
          ascending ? order.rank[u] < r : order.rank[u] > r;
      if (!processed) continue;
      if (std::find(seen.begin(), seen.end(), label[u]) == seen.end())
        seen.push_back(label[u]);
    }
    if (seen.empty()) {
      label[v] = std::int32_t(comp_extremum.size());
      comp_extremum.push_back(v);
      continue;
    }
    auto age = [&](std::int32_t l) {
      const std::uint32_t rr = order.rank[comp_extremum[l]];
      return ascending ? rr : std::uint32_t(n - 1) - rr;
    };
    std::sort(seen.begin(), seen.end(),
              [&](std::int32_t a, std::int32_t b) { return age(a) < age(b); });
    const std::int32_t survivor = seen.front();
    for (std::size_t j = 1; j < seen.size(); ++j) {
      const VertexId e = comp_extremum[seen[j]];
      PersistencePair p;
      if (ascending) {
        p = {e, v, f.values[e], f.values[v], PairClass::MinSaddle};
      } else {
        p = {v, e, f.values[v], f.values[e], PairClass::SaddleMax};
      }
      out.push_back(p);
    }
    label[v] = survivor;
    if (seen.size() == 1) continue;
    // Flood fill from v across the merged region of the level set.
    std::vector<VertexId> stack{v};
    while (!stack.empty()) {
      const VertexId cur = stack.back();
      stack.pop_back();
      std::array<VertexId, 14> cn;
      const int cc = link_neighbors(f, cur, cn);
      for (int i = 0; i < cc; ++i) {
        const VertexId u = cn[i];
        const bool processed =
            ascending ? order.rank[u] < r : order.rank[u] > r;
        if (!processed) continue;
        if (label[u] != survivor) {
          label[u] = survivor;
          stack.push_back(u);
        }
      }
    }
  }
}

}  // namespace detail

/// Independent oracle for compute_diagram; refuses fields beyond 10^4
/// vertices.
inline PersistenceDiagram brute_force_diagram(const ScalarField& f) {
  if (f.vertex_count() > 10000)
    throw FieldError("brute_force_diagram limited to 10^4 vertices");
  const VertexOrder order = build_order(f);
  PersistenceDiagram d;
  detail::brute_sweep(f, order, true, d.pairs);
  detail::brute_sweep(f, order, false, d.pairs);
  const VertexId lo = order.sorted.front();
  const VertexId hi = order.sorted.back();
  d.pairs.push_back({lo, hi, f.values[lo], f.values[hi], PairClass::Essential});
  d.field_range = {f.values[lo], f.values[hi]};
  detail::sort_pairs(d.pairs);
  return d;
}

struct FilterResult {
  PersistenceDiagram kept;
  std::vector<PersistencePair> removed;
};

/// Splits a diagram at the persistence threshold. Removal is strict: pairs
/// with persistence below eps are removed, pairs at exactly eps are kept,
/// and the essential pair is never removable.
inline FilterResult filter_diagram(const PersistenceDiagram& d, double eps) {
  if (eps < 0.0) throw FieldError("persistence threshold must be >= 0");
  FilterResult r;
  r.kept.field_range = d.field_range;
  for (const auto& p : d.pairs) {
    if (p.pair_class == PairClass::Essential || p.persistence() >= eps)
      r.kept.pairs.push_back(p);
    else
      r.removed.push_back(p);
  }
  return r;
}

}  // namespace topocomp
