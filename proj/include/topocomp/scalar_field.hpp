#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "topocomp/errors.hpp"

namespace topocomp {

using VertexId = std::uint32_t;
using Dims3 = std::array<std::uint32_t, 3>;

inline constexpr VertexId kInvalidVertex = 0xFFFFFFFFu;

/// Scalar field sampled at the vertices of a regular grid, together with an
/// injective integer offset per vertex that breaks value ties (a variant of
/// simulation of simplicity). The grid is implicitly triangulated: each cell
/// is split along the main diagonal from (i,j,k) to (i+1,j+1,k+1), i.e. one
/// diagonal per quad in 2D and a 6-tet subdivision per cube in 3D.
struct ScalarField {
  Dims3 dims{1, 1, 1};
  std::vector<double> values;     // row-major, x fastest
  std::vector<VertexId> offsets;  // permutation of 0..n_v-1

  std::size_t vertex_count() const { return values.size(); }

  int dimensionality() const { return dims[2] > 1 ? 3 : 2; }

  std::array<std::uint32_t, 3> coords(VertexId v) const {
    const std::uint32_t x = v % dims[0];
    const std::uint32_t rest = v / dims[0];
    return {x, rest % dims[1], rest / dims[1]};
  }

  VertexId vertex_at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
    return x + dims[0] * (y + dims[1] * z);
  }
};

/// Builds a validated field. When offsets are omitted the memory position of
/// each vertex is used, so ties resolve in row-major order.
inline ScalarField build_field(Dims3 dims, std::vector<double> values,
                               std::vector<VertexId> offsets = {}) {
  const std::uint64_t n =
      std::uint64_t(dims[0]) * std::uint64_t(dims[1]) * std::uint64_t(dims[2]);
  if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
    throw FieldError("all grid dimensions must be positive");
  if (n < 2) throw FieldError("grid must contain at least two vertices");
  if (n > 0xFFFFFFFFull) throw FieldError("grid too large for 32-bit vertex ids");
  if (values.size() != n)
    throw FieldError("length mismatch: expected " + std::to_string(n) +
                     " values, got " + std::to_string(values.size()));
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (!std::isfinite(values[v]))
      throw FieldError("non-finite value at vertex " + std::to_string(v));
  }
  if (offsets.empty()) {
    offsets.resize(values.size());
    std::iota(offsets.begin(), offsets.end(), VertexId(0));
  } else {
    if (offsets.size() != values.size())
      throw FieldError("offsets length does not match vertex count");
    std::vector<bool> seen(values.size(), false);
    for (VertexId o : offsets) {
      if (o >= values.size() || seen[o])
        throw FieldError("offsets must be a permutation of 0..n_v-1");
      seen[o] = true;
    }
  }
  ScalarField f;
  f.dims = dims;
  f.values = std::move(values);
  f.offsets = std::move(offsets);
  return f;
}

/// Total order on vertices induced by lexicographic (value, offset)
/// comparison. rank[u] < rank[v] iff (f(u),O(u)) < (f(v),O(v)).
struct VertexOrder {
  std::vector<VertexId> sorted;     // position -> vertex
  std::vector<std::uint32_t> rank;  // vertex -> position

  bool less(VertexId u, VertexId v) const { return rank[u] < rank[v]; }
};

inline VertexOrder build_order(const ScalarField& f) {
  VertexOrder order;
  order.sorted.resize(f.vertex_count());
  std::iota(order.sorted.begin(), order.sorted.end(), VertexId(0));
  std::sort(order.sorted.begin(), order.sorted.end(),
            [&f](VertexId a, VertexId b) {
              if (f.values[a] != f.values[b]) return f.values[a] < f.values[b];
              return f.offsets[a] < f.offsets[b];
            });
  order.rank.resize(f.vertex_count());
  for (std::uint32_t r = 0; r < order.sorted.size(); ++r)
    order.rank[order.sorted[r]] = r;
  return order;
}

enum class CriticalType : std::uint8_t {
  Regular,
  Minimum,
  Saddle1,
  Saddle2,  // 3D only
  Maximum,
  Degenerate,
};

inline const char* to_string(CriticalType t) {
  switch (t) {
    case CriticalType::Regular: return "regular";
    case CriticalType::Minimum: return "minimum";
    case CriticalType::Saddle1: return "saddle1";
    case CriticalType::Saddle2: return "saddle2";
    case CriticalType::Maximum: return "maximum";
    case CriticalType::Degenerate: return "degenerate";
  }
  return "?";
}

namespace detail {

// Edge vectors of the triangulation. Two vertices are adjacent iff their
// coordinate delta is in {-1,0,1}^3 with all nonzero components of equal
// sign (the edges of the diagonal-aligned cell subdivision).
inline constexpr std::array<std::array<int, 3>, 14> kNeighborDeltas = {{
    {1, 0, 0},  {0, 1, 0},  {0, 0, 1},
    {1, 1, 0},  {1, 0, 1},  {0, 1, 1},
    {1, 1, 1},
    {-1, 0, 0},  {0, -1, 0},  {0, 0, -1},
    {-1, -1, 0}, {-1, 0, -1}, {0, -1, -1},
    {-1, -1, -1},
}};

}  // namespace detail

/// Writes the 1-skeleton neighbors of v into `out`; returns their count.
/// Up to 6 neighbors in 2D and 14 in 3D, truncated at the grid boundary.
inline int link_neighbors(const ScalarField& f, VertexId v,
                          std::array<VertexId, 14>& out) {
  if (v >= f.vertex_count()) throw FieldError("vertex id out of range");
  const auto c = f.coords(v);
  int count = 0;
  for (const auto& d : detail::kNeighborDeltas) {
    const std::int64_t x = std::int64_t(c[0]) + d[0];
    const std::int64_t y = std::int64_t(c[1]) + d[1];
    const std::int64_t z = std::int64_t(c[2]) + d[2];
    if (x < 0 || y < 0 || z < 0 || x >= f.dims[0] || y >= f.dims[1] ||
        z >= f.dims[2])
      continue;
    out[count++] = f.vertex_at(std::uint32_t(x), std::uint32_t(y), std::uint32_t(z));
  }
  return count;
}

inline std::vector<VertexId> link_neighbors(const ScalarField& f, VertexId v) {
  std::array<VertexId, 14> buf;
  const int n = link_neighbors(f, v, buf);
  return std::vector<VertexId>(buf.begin(), buf.begin() + n);
}

/// True iff u and w share an edge of the triangulation.
inline bool link_adjacent(const ScalarField& f, VertexId u, VertexId w) {
  if (u == w) return false;
  const auto a = f.coords(u);
  const auto b = f.coords(w);
  int pos = 0, neg = 0;
  for (int i = 0; i < 3; ++i) {
    const std::int64_t d = std::int64_t(b[i]) - std::int64_t(a[i]);
    if (d > 1 || d < -1) return false;
    if (d == 1) ++pos;
    if (d == -1) ++neg;
  }
  return (pos + neg) > 0 && (pos == 0 || neg == 0);
}

namespace detail {

// Number of connected components of the subgraph induced on `verts`
// (a subset of one vertex link, so at most 14 vertices).
inline int link_component_count(const ScalarField& f, const VertexId* verts,
                                int n) {
  if (n == 0) return 0;
  std::array<bool, 14> visited{};
  std::array<int, 14> stack;
  int components = 0;
  for (int s = 0; s < n; ++s) {
    if (visited[s]) continue;
    ++components;
    int top = 0;
    stack[top++] = s;
    visited[s] = true;
    while (top > 0) {
      const int cur = stack[--top];
      for (int t = 0; t < n; ++t) {
        if (!visited[t] && link_adjacent(f, verts[cur], verts[t])) {
          visited[t] = true;
          stack[top++] = t;
        }
      }
    }
  }
  return components;
}

}  // namespace detail

/// Classifies a vertex from the connectivity of its lower and upper links.
inline CriticalType classify_vertex(const ScalarField& f,
                                    const VertexOrder& order, VertexId v) {
  std::array<VertexId, 14> nbr;
  const int n = link_neighbors(f, v, nbr);
  std::array<VertexId, 14> lower, upper;
  int nl = 0, nu = 0;
  for (int i = 0; i < n; ++i) {
    if (order.rank[nbr[i]] < order.rank[v])
      lower[nl++] = nbr[i];
    else
      upper[nu++] = nbr[i];
  }
  if (nl == 0) return CriticalType::Minimum;
  if (nu == 0) return CriticalType::Maximum;
  const int beta_lower = detail::link_component_count(f, lower.data(), nl);
  const int beta_upper = detail::link_component_count(f, upper.data(), nu);
  if (beta_lower == 2) return CriticalType::Saddle1;
  if (f.dimensionality() == 3 && beta_upper == 2) return CriticalType::Saddle2;
  if (beta_lower > 2 || beta_upper > 2) return CriticalType::Degenerate;
  return CriticalType::Regular;
}

}  // namespace topocomp
