// Factorial-enumeration oracle for the diagram matching distances: tries
// every class-respecting injection of the smaller diagram into the larger
// one, collapsing leftovers at their persistence. Exponential; only for
// diagrams with a handful of pairs per class.
#pragma once

#include <limits>
#include <random>

#include "topocomp/metrics.hpp"

namespace testoracle {

using topocomp::PairClass;
using topocomp::PersistenceDiagram;

struct OraclePair {
  double max_cost;
  double sum_cost;
};

inline OraclePair oracle_class(std::vector<topocomp::detail::DiagPoint> a,
                               std::vector<topocomp::detail::DiagPoint> b) {
  using topocomp::detail::dist_inf;
  if (a.size() > b.size()) std::swap(a, b);
  if (b.empty()) return {0.0, 0.0};
  std::vector<int> target(a.size(), -1);
  std::vector<char> used(b.size(), 0);
  OraclePair best{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
  auto dfs = [&](auto&& self, std::size_t i) -> void {
    if (i == a.size()) {
      double mx = 0.0, sum = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double c = dist_inf(a[k], b[target[k]]);
        mx = std::max(mx, c);
        sum += c;
      }
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (used[j]) continue;
        mx = std::max(mx, b[j].pers());
        sum += b[j].pers();
      }
      best.max_cost = std::min(best.max_cost, mx);
      best.sum_cost = std::min(best.sum_cost, sum);
      return;
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      used[j] = 1;
      target[i] = int(j);
      self(self, i + 1);
      used[j] = 0;
    }
  };
  dfs(dfs, 0);
  return best;
}

inline OraclePair oracle_distances(const PersistenceDiagram& d1,
                                   const PersistenceDiagram& d2) {
  const auto a = topocomp::detail::split_by_class(d1);
  const auto b = topocomp::detail::split_by_class(d2);
  OraclePair out{0.0, 0.0};
  for (std::size_t c = 0; c < 3; ++c) {
    const OraclePair r = oracle_class(a[c], b[c]);
    out.max_cost = std::max(out.max_cost, r.max_cost);
    out.sum_cost += r.sum_cost;
  }
  return out;
}

inline PersistenceDiagram random_diagram(std::mt19937_64& rng,
                                         int max_per_class) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PersistenceDiagram d;
  const double lo = unit(rng), hi = lo + 1.0 + unit(rng);
  d.pairs.push_back({0, 1, lo, hi, PairClass::Essential});
  d.field_range = {lo, hi};
  for (PairClass c : {PairClass::MinSaddle, PairClass::SaddleMax}) {
    const int k = int(rng() % std::uint64_t(max_per_class + 1));
    for (int i = 0; i < k; ++i) {
      const double b = lo + unit(rng) * (hi - lo);
      const double dv = b + unit(rng) * (hi - b);
      d.pairs.push_back({0, 1, b, dv, c});
    }
  }
  return d;
}

}  // namespace testoracle
