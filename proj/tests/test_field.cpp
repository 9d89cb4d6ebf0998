#include "topocomp/scalar_field.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "synthetic.hpp"

using namespace topocomp;

namespace {

TEST(BuildField, IdentityOffsets) {
  std::vector<double> vals(9);
  for (int i = 0; i < 9; ++i) vals[i] = i;
  const ScalarField f = build_field({3, 3, 1}, vals);
  EXPECT_EQ(f.vertex_count(), 9u);
  for (VertexId v = 0; v < 9; ++v) EXPECT_EQ(f.offsets[v], v);
}

TEST(BuildField, LengthMismatch) {
  EXPECT_THROW(build_field({2, 2, 2}, std::vector<double>(7, 0.0)), FieldError);
}

TEST(BuildField, RejectsNonFinite) {
  std::vector<double> vals(9, 0.0);
  vals[4] = std::numeric_limits<double>::quiet_NaN();
  try {
    build_field({3, 3, 1}, vals);
    FAIL() << "expected FieldError";
  } catch (const FieldError& e) {
    EXPECT_NE(std::string(e.what()).find("4"), std::string::npos);
  }
}

TEST(BuildField, ConstantFieldOrderedByOffset) {
  const ScalarField f = build_field({3, 3, 1}, std::vector<double>(9, 0.0));
  const VertexOrder order = build_order(f);
  for (VertexId v = 0; v < 9; ++v) EXPECT_EQ(order.rank[v], v);
}

TEST(BuildField, RejectsBadOffsets) {
  std::vector<VertexId> offsets{0, 1, 2, 3, 4, 5, 6, 7, 7};
  EXPECT_THROW(build_field({3, 3, 1}, std::vector<double>(9, 0.0), offsets),
               FieldError);
}

TEST(LinkNeighbors, CornersOf3x3) {
  const ScalarField f = testfields::make_ramp({3, 3, 1});
  // (0,0): axis neighbors v1, v3 plus the (+1,+1) diagonal v4.
  std::vector<VertexId> n0 = link_neighbors(f, 0);
  std::sort(n0.begin(), n0.end());
  EXPECT_EQ(n0, (std::vector<VertexId>{1, 3, 4}));
  // (2,0): no diagonal is incident at this corner.
  std::vector<VertexId> n2 = link_neighbors(f, 2);
  std::sort(n2.begin(), n2.end());
  EXPECT_EQ(n2, (std::vector<VertexId>{1, 5}));
}

TEST(LinkNeighbors, InteriorCenterHas14NeighborsIn3D) {
  const ScalarField f = testfields::make_ramp({3, 3, 3});
  EXPECT_EQ(link_neighbors(f, f.vertex_at(1, 1, 1)).size(), 14u);
}

TEST(LinkNeighbors, OutOfRange) {
  const ScalarField f = testfields::make_ramp({3, 3, 1});
  EXPECT_THROW(link_neighbors(f, 9), FieldError);
}

// Oracle: enumerate the edges of the diagonal cell subdivision directly.
// 2D cells split into two triangles along (+1,+1); 3D cells split into six
// tetrahedra, one per monotone lattice path from (0,0,0) to (1,1,1).
std::set<std::pair<VertexId, VertexId>> enumerate_edges(const ScalarField& f) {
  std::set<std::pair<VertexId, VertexId>> edges;
  auto add = [&edges](VertexId a, VertexId b) {
    edges.emplace(std::min(a, b), std::max(a, b));
  };
  const auto [nx, ny, nz] = f.dims;
  if (nz == 1) {
    for (std::uint32_t y = 0; y + 1 < ny; ++y)
      for (std::uint32_t x = 0; x + 1 < nx; ++x) {
        const VertexId a = f.vertex_at(x, y, 0), b = f.vertex_at(x + 1, y, 0);
        const VertexId c = f.vertex_at(x, y + 1, 0),
                       d = f.vertex_at(x + 1, y + 1, 0);
        for (auto [u, v] : {std::pair{a, b}, {a, c}, {a, d}, {b, d}, {c, d}})
          add(u, v);
      }
    // Single row/column grids still carry their axis edges.
    if (ny == 1)
      for (std::uint32_t x = 0; x + 1 < nx; ++x)
        add(f.vertex_at(x, 0, 0), f.vertex_at(x + 1, 0, 0));
    if (nx == 1)
      for (std::uint32_t y = 0; y + 1 < ny; ++y)
        add(f.vertex_at(0, y, 0), f.vertex_at(0, y + 1, 0));
    return edges;
  }
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (std::uint32_t z = 0; z + 1 < nz; ++z)
    for (std::uint32_t y = 0; y + 1 < ny; ++y)
      for (std::uint32_t x = 0; x + 1 < nx; ++x) {
        for (const auto& perm : perms) {
          std::uint32_t c[3] = {x, y, z};
          VertexId tet[4];
          tet[0] = f.vertex_at(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[perm[step]];
            tet[step + 1] = f.vertex_at(c[0], c[1], c[2]);
          }
          for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) add(tet[i], tet[j]);
        }
      }
  return edges;
}

TEST(LinkNeighbors, MatchesCellSubdivisionOracle) {
  for (const Dims3 dims : {Dims3{3, 3, 3}, Dims3{4, 3, 2}, Dims3{4, 4, 1},
                           Dims3{2, 2, 2}, Dims3{5, 1, 1}}) {
    const ScalarField f = testfields::make_ramp(dims);
    const auto oracle = enumerate_edges(f);
    std::set<std::pair<VertexId, VertexId>> got;
    for (VertexId v = 0; v < f.vertex_count(); ++v)
      for (VertexId u : link_neighbors(f, v))
        got.emplace(std::min(u, v), std::max(u, v));
    EXPECT_EQ(got, oracle) << "dims " << dims[0] << "x" << dims[1] << "x"
                           << dims[2];
  }
}

TEST(LinkNeighbors, Symmetric) {
  const ScalarField f = testfields::make_uniform_random({4, 3, 3}, 7);
  for (VertexId v = 0; v < f.vertex_count(); ++v) {
    for (VertexId u : link_neighbors(f, v)) {
      const auto back = link_neighbors(f, u);
      EXPECT_NE(std::find(back.begin(), back.end(), v), back.end());
    }
  }
}

TEST(Classify, SmallExample) {
  const ScalarField f =
      build_field({3, 3, 1}, {0, 4, 2, 5, 6, 7, 8, 9, 10});
  const VertexOrder order = build_order(f);
  EXPECT_EQ(classify_vertex(f, order, 0), CriticalType::Minimum);
  EXPECT_EQ(classify_vertex(f, order, 2), CriticalType::Minimum);
  EXPECT_EQ(classify_vertex(f, order, 1), CriticalType::Saddle1);
  EXPECT_EQ(classify_vertex(f, order, 8), CriticalType::Maximum);
}

TEST(Classify, MonotoneRamp) {
  const ScalarField f = testfields::make_ramp({3, 3, 1});
  const VertexOrder order = build_order(f);
  int minima = 0, maxima = 0, saddles = 0;
  for (VertexId v = 0; v < 9; ++v) {
    const CriticalType t = classify_vertex(f, order, v);
    minima += t == CriticalType::Minimum;
    maxima += t == CriticalType::Maximum;
    saddles += t != CriticalType::Minimum && t != CriticalType::Maximum &&
               t != CriticalType::Regular;
  }
  EXPECT_EQ(minima, 1);
  EXPECT_EQ(maxima, 1);
  EXPECT_EQ(saddles, 0);
  EXPECT_EQ(classify_vertex(f, order, 0), CriticalType::Minimum);
  EXPECT_EQ(classify_vertex(f, order, 8), CriticalType::Maximum);
}

TEST(Classify, DegenerateStar) {
  // Alternate low/high values around the center's 6-cycle link; three lower
  // components make the vertex degenerate.
  const ScalarField f = build_field(
      {3, 3, 1},
      // ring around v4=(1,1): v3,v0,v1,v5,v8,v7 -> -1, 1, -1, 1, -1, 1
      {1, -1, 0.5, -1, 0, 1, 0.25, 1, -1});
  const VertexOrder order = build_order(f);
  EXPECT_EQ(classify_vertex(f, order, 4), CriticalType::Degenerate);
}

TEST(Classify, InvariantUnderMonotoneTransform) {
  const ScalarField f = testfields::make_uniform_random({5, 4, 3}, 99);
  ScalarField g = f;
  for (auto& v : g.values) v = std::exp(2.0 * v) - 3.0;
  const VertexOrder of = build_order(f);
  const VertexOrder og = build_order(g);
  for (VertexId v = 0; v < f.vertex_count(); ++v)
    EXPECT_EQ(classify_vertex(f, of, v), classify_vertex(g, og, v));
}

TEST(Classify, EveryFiniteFieldHasExtrema) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ScalarField f = testfields::make_tied_random({4, 4, 2}, seed, 3);
    const VertexOrder order = build_order(f);
    int minima = 0, maxima = 0;
    for (VertexId v = 0; v < f.vertex_count(); ++v) {
      const CriticalType t = classify_vertex(f, order, v);
      minima += t == CriticalType::Minimum;
      maxima += t == CriticalType::Maximum;
    }
    EXPECT_GE(minima, 1);
    EXPECT_GE(maxima, 1);
  }
}

}  // namespace
