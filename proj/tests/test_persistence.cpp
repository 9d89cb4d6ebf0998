#include "topocomp/persistence.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>
#include <vector>

#include "synthetic.hpp"

using namespace topocomp;

namespace {

using ValueTriple = std::tuple<double, double, int>;

std::vector<ValueTriple> value_multiset(const PersistenceDiagram& d) {
  std::vector<ValueTriple> out;
  for (const auto& p : d.pairs)
    out.emplace_back(p.birth_value, p.death_value, int(p.pair_class));
  std::sort(out.begin(), out.end());
  return out;
}

int count_class(const PersistenceDiagram& d, PairClass c) {
  return int(std::count_if(d.pairs.begin(), d.pairs.end(),
                           [c](const PersistencePair& p) {
                             return p.pair_class == c;
                           }));
}

TEST(ComputeDiagram, SmallExample) {
  const ScalarField f = build_field({3, 3, 1}, {0, 4, 2, 5, 6, 7, 8, 9, 10});
  const PersistenceDiagram d = compute_diagram(f);
  ASSERT_EQ(d.pairs.size(), 2u);
  const auto& ms = d.pairs[int(d.pairs[0].pair_class) == int(PairClass::MinSaddle) ? 0 : 1];
  EXPECT_EQ(ms.pair_class, PairClass::MinSaddle);
  EXPECT_EQ(ms.birth_vertex, 2u);
  EXPECT_EQ(ms.death_vertex, 1u);
  EXPECT_EQ(ms.birth_value, 2.0);
  EXPECT_EQ(ms.death_value, 4.0);
  const auto& e = d.essential();
  EXPECT_EQ(e.birth_vertex, 0u);
  EXPECT_EQ(e.death_vertex, 8u);
  EXPECT_EQ(e.birth_value, 0.0);
  EXPECT_EQ(e.death_value, 10.0);
}

TEST(ComputeDiagram, MonotoneRampHasOnlyEssential) {
  const PersistenceDiagram d =
      compute_diagram(testfields::make_ramp({3, 3, 1}));
  ASSERT_EQ(d.pairs.size(), 1u);
  EXPECT_EQ(d.pairs[0].pair_class, PairClass::Essential);
  EXPECT_EQ(d.pairs[0].birth_value, 0.0);
  EXPECT_EQ(d.pairs[0].death_value, 8.0);
}

TEST(ComputeDiagram, TwoHumpProfile) {
  // 1D two-hump profile extruded to 2 rows: valley at 1, humps 5 and 3.
  const std::vector<double> profile{0, 5, 1, 3, 0.5};
  std::vector<double> vals;
  for (int row = 0; row < 2; ++row)
    for (double x : profile) vals.push_back(x);
  const ScalarField f = build_field({5, 2, 1}, vals);
  const PersistenceDiagram d = compute_diagram(f);
  ASSERT_EQ(count_class(d, PairClass::SaddleMax), 1);
  for (const auto& p : d.pairs) {
    if (p.pair_class != PairClass::SaddleMax) continue;
    // Lower hump (3) dies where it merges with the higher one (valley 1).
    EXPECT_DOUBLE_EQ(p.persistence(), 3.0 - 1.0);
  }
  EXPECT_EQ(brute_force_diagram(f).pairs.size(), d.pairs.size());
}

TEST(BruteForce, ConstantField) {
  const PersistenceDiagram d =
      brute_force_diagram(testfields::make_constant({3, 3, 1}, 5.0));
  ASSERT_EQ(d.pairs.size(), 1u);
  EXPECT_EQ(d.pairs[0].pair_class, PairClass::Essential);
  EXPECT_EQ(d.pairs[0].birth_vertex, 0u);  // first offset
  EXPECT_EQ(d.pairs[0].death_vertex, 8u);  // last offset
}

TEST(BruteForce, RefusesLargeFields) {
  EXPECT_THROW(brute_force_diagram(testfields::make_ramp({101, 101, 1})),
               FieldError);
}

TEST(OracleEquivalence, RandomFields) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const Dims3 dims{std::uint32_t(2 + rng() % 9), std::uint32_t(2 + rng() % 9),
                     std::uint32_t(1 + rng() % 4)};
    ScalarField f;
    switch (trial % 3) {
      case 0: f = testfields::make_uniform_random(dims, rng()); break;
      case 1: f = testfields::make_tied_random(dims, rng(), 4); break;
      default:
        f = testfields::scramble_offsets(
            testfields::make_tied_random(dims, rng(), 3), rng());
    }
    const PersistenceDiagram a = compute_diagram(f);
    const PersistenceDiagram b = brute_force_diagram(f);
    EXPECT_EQ(value_multiset(a), value_multiset(b))
        << "dims " << dims[0] << "x" << dims[1] << "x" << dims[2]
        << " trial " << trial;
  }
}

TEST(ComputeDiagram, PairCountsMatchExtremaCounts) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const ScalarField f = testfields::make_uniform_random({6, 6, 3}, seed);
    const VertexOrder order = build_order(f);
    const PersistenceDiagram d = compute_diagram(f, order);
    int minima = 0, maxima = 0;
    for (VertexId v = 0; v < f.vertex_count(); ++v) {
      const CriticalType t = classify_vertex(f, order, v);
      minima += t == CriticalType::Minimum;
      maxima += t == CriticalType::Maximum;
    }
    EXPECT_EQ(count_class(d, PairClass::MinSaddle), minima - 1);
    EXPECT_EQ(count_class(d, PairClass::SaddleMax), maxima - 1);
  }
}

TEST(ComputeDiagram, ShiftInvariance) {
  const ScalarField f = testfields::make_uniform_random({5, 5, 2}, 11);
  ScalarField g = f;
  for (auto& v : g.values) v += 42.0;
  const auto df = compute_diagram(f);
  const auto dg = compute_diagram(g);
  ASSERT_EQ(df.pairs.size(), dg.pairs.size());
  for (std::size_t i = 0; i < df.pairs.size(); ++i) {
    EXPECT_DOUBLE_EQ(df.pairs[i].birth_value + 42.0, dg.pairs[i].birth_value);
    EXPECT_DOUBLE_EQ(df.pairs[i].death_value + 42.0, dg.pairs[i].death_value);
  }
}

TEST(ComputeDiagram, DeathNeverBeforeBirth) {
  const ScalarField f =
      testfields::scramble_offsets(testfields::make_tied_random({6, 5, 2}, 3, 3), 5);
  const VertexOrder order = build_order(f);
  for (const auto& p : compute_diagram(f, order).pairs) {
    EXPECT_GE(p.death_value, p.birth_value);
    if (p.death_value == p.birth_value)
      EXPECT_GT(order.rank[p.death_vertex], order.rank[p.birth_vertex]);
  }
}

TEST(FilterDiagram, SmallExample) {
  PersistenceDiagram d;
  d.pairs.push_back({0, 8, 0.0, 10.0, PairClass::Essential});
  d.pairs.push_back({2, 1, 2.0, 4.0, PairClass::MinSaddle});
  d.field_range = {0.0, 10.0};
  const FilterResult r = filter_diagram(d, 3.0);
  ASSERT_EQ(r.kept.pairs.size(), 1u);
  EXPECT_EQ(r.kept.pairs[0].pair_class, PairClass::Essential);
  ASSERT_EQ(r.removed.size(), 1u);
  EXPECT_EQ(r.removed[0].birth_value, 2.0);
}

TEST(FilterDiagram, ZeroThresholdKeepsAll) {
  const auto d = compute_diagram(testfields::make_uniform_random({5, 5, 1}, 4));
  const FilterResult r = filter_diagram(d, 0.0);
  EXPECT_EQ(r.kept.pairs.size(), d.pairs.size());
  EXPECT_TRUE(r.removed.empty());
}

TEST(FilterDiagram, FullRangeKeepsEssentialOnly) {
  const auto d = compute_diagram(testfields::make_uniform_random({6, 6, 2}, 8));
  const double range = d.field_range.second - d.field_range.first;
  const FilterResult r = filter_diagram(d, range);
  ASSERT_EQ(r.kept.pairs.size(), 1u);
  EXPECT_EQ(r.kept.pairs[0].pair_class, PairClass::Essential);
  EXPECT_EQ(r.kept.pairs.size() + r.removed.size(), d.pairs.size());
}

TEST(FilterDiagram, ExactThresholdKept) {
  PersistenceDiagram d;
  d.pairs.push_back({0, 9, 0.0, 10.0, PairClass::Essential});
  d.pairs.push_back({1, 2, 1.0, 4.0, PairClass::MinSaddle});
  const FilterResult r = filter_diagram(d, 3.0);
  EXPECT_EQ(r.kept.pairs.size(), 2u);  // persistence == eps stays
  EXPECT_THROW(filter_diagram(d, -1.0), FieldError);
}

}  // namespace
