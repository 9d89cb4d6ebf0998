#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "topocomp/errors.hpp"
#include "topocomp/persistence.hpp"
#include "topocomp/scalar_field.hpp"

namespace topocomp {

namespace detail {

inline void check_same_dims(const ScalarField& f, const ScalarField& g) {
  if (f.dims != g.dims)
    throw MetricsError("fields have different grid dimensions");
}

}  // namespace detail

/// (sum_v |f(v)-g(v)|^p)^(1/p), computed in scaled form to avoid overflow
/// for large p.
inline double p_norm(const ScalarField& f, const ScalarField& g, double p) {
  detail::check_same_dims(f, g);
  if (p < 1.0) throw MetricsError("p-norm requires p >= 1");
  double peak = 0.0;
  for (std::size_t v = 0; v < f.values.size(); ++v)
    peak = std::max(peak, std::abs(f.values[v] - g.values[v]));
  if (peak == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t v = 0; v < f.values.size(); ++v)
    sum += std::pow(std::abs(f.values[v] - g.values[v]) / peak, p);
  return peak * std::pow(sum, 1.0 / p);
}

inline double max_norm(const ScalarField& f, const ScalarField& g) {
  detail::check_same_dims(f, g);
  double m = 0.0;
  for (std::size_t v = 0; v < f.values.size(); ++v)
    m = std::max(m, std::abs(f.values[v] - g.values[v]));
  return m;
}

/// Peak signal to noise ratio relative to the range of f. Infinite when the
/// fields are identical.
inline double psnr(const ScalarField& f, const ScalarField& g) {
  detail::check_same_dims(f, g);
  const double l2 = p_norm(f, g, 2.0);
  if (l2 == 0.0) return std::numeric_limits<double>::infinity();
  const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
  const double range = *hi - *lo;
  const double n_v = double(f.vertex_count());
  return 20.0 * std::log10(std::sqrt(n_v) / 2.0 * range / l2);
}

namespace detail {

struct DiagPoint {
  double birth;
  double death;

  double pers() const { return death - birth; }
};

inline double dist_inf(const DiagPoint& p, const DiagPoint& q) {
  return std::max(std::abs(p.birth - q.birth), std::abs(p.death - q.death));
}

inline std::array<std::vector<DiagPoint>, 3> split_by_class(
    const PersistenceDiagram& d) {
  std::array<std::vector<DiagPoint>, 3> out;
  for (const auto& p : d.pairs)
    out[std::size_t(p.pair_class)].push_back({p.birth_value, p.death_value});
  return out;
}

inline constexpr std::size_t kAssignmentGuard = 2000;

// Matching feasibility at threshold t: every point of the smaller diagram A
// must be matched within distance t, and every point of the larger diagram B
// with persistence above t must be matched too (anything else may collapse
// onto its own pair at cost equal to its persistence).
inline bool bottleneck_feasible(const std::vector<DiagPoint>& a,
                                const std::vector<DiagPoint>& b, double t) {
  const int na = int(a.size()), nb = int(b.size());
  std::vector<int> match_a(na, -1);  // a index -> b index
  std::vector<int> match_b(nb, -1);

  // Saturate A with Kuhn's augmenting paths.
  std::vector<char> used(nb, 0);
  auto try_match = [&](auto&& self, int ia) -> bool {
    for (int jb = 0; jb < nb; ++jb) {
      if (used[jb] || dist_inf(a[ia], b[jb]) > t) continue;
      used[jb] = 1;
      if (match_b[jb] < 0 || self(self, match_b[jb])) {
        match_a[ia] = jb;
        match_b[jb] = ia;
        return true;
      }
    }
    return false;
  };
  for (int ia = 0; ia < na; ++ia) {
    std::fill(used.begin(), used.end(), 0);
    if (!try_match(try_match, ia)) return false;
  }

  // Reroute so that every unmatched B point has persistence at most t.
  // Alternating search: b -> adjacent a -> a's partner b' -> ... until some
  // reachable matched b' may be dropped.
  for (int jb = 0; jb < nb; ++jb) {
    if (match_b[jb] >= 0 || b[jb].pers() <= t) continue;
    std::vector<char> seen_a(na, 0);
    std::vector<int> pred_a(na, -1);  // a -> b it was reached from
    std::vector<int> stack_b{jb};
    bool done = false;
    while (!stack_b.empty() && !done) {
      const int cur_b = stack_b.back();
      stack_b.pop_back();
      for (int ia = 0; ia < na && !done; ++ia) {
        if (seen_a[ia] || dist_inf(a[ia], b[cur_b]) > t) continue;
        seen_a[ia] = 1;
        pred_a[ia] = cur_b;
        const int partner = match_a[ia];
        if (partner < 0) throw InternalError("A left unsaturated during reroute");
        if (b[partner].pers() <= t) {
          // Toggle the alternating path; `partner` becomes unmatched, which
          // is allowed since its persistence fits under t.
          int cur_a = ia;
          for (;;) {
            const int from_b = pred_a[cur_a];
            const int prev_a = match_b[from_b];
            match_a[cur_a] = from_b;
            match_b[from_b] = cur_a;
            if (from_b == jb) break;
            cur_a = prev_a;
          }
          match_b[partner] = -1;
          done = true;
        } else {
          stack_b.push_back(partner);
        }
      }
    }
    if (!done) return false;
  }
  return true;
}

inline double bottleneck_class(std::vector<DiagPoint> a,
                               std::vector<DiagPoint> b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (std::max(a.size(), b.size()) > kAssignmentGuard)
    throw MetricsError("diagram too large for exact matching (guard: 2000)");
  if (b.empty()) return 0.0;

  std::vector<double> candidates{0.0};
  for (const auto& q : b) candidates.push_back(q.pers());
  for (const auto& p : a)
    for (const auto& q : b) candidates.push_back(dist_inf(p, q));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  std::size_t lo = 0, hi = candidates.size() - 1;
  if (bottleneck_feasible(a, b, candidates[lo])) return candidates[lo];
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (bottleneck_feasible(a, b, candidates[mid]))
      hi = mid;
    else
      lo = mid;
  }
  if (!bottleneck_feasible(a, b, candidates[hi]))
    throw InternalError("no feasible bottleneck matching at maximum cost");
  return candidates[hi];
}

// Exact linear assignment (shortest augmenting paths with potentials).
inline double assignment_min_cost(const std::vector<double>& cost, int n) {
  if (n == 0) return 0.0;
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost[(p[j] - 1) * n + (j - 1)];
  return total;
}

inline double wasserstein_class(std::vector<DiagPoint> a,
                                std::vector<DiagPoint> b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (std::max(a.size(), b.size()) > kAssignmentGuard)
    throw MetricsError("diagram too large for exact matching (guard: 2000)");
  const int n = int(b.size());
  if (n == 0) return 0.0;
  // Rows beyond |a| stand for collapsing the column's point onto the other
  // extremity of its own pair, at a cost equal to its persistence.
  std::vector<double> cost(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[std::size_t(i) * n + j] =
          i < int(a.size()) ? dist_inf(a[i], b[j]) : b[j].pers();
  return assignment_min_cost(cost, n);
}

}  // namespace detail

/// Bottleneck distance with class-respecting matchings: the smaller diagram
/// injects into the larger one, unmatched points collapse at a cost equal to
/// their persistence.
inline double bottleneck(const PersistenceDiagram& d1,
                         const PersistenceDiagram& d2) {
  const auto a = detail::split_by_class(d1);
  const auto b = detail::split_by_class(d2);
  double worst = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    worst = std::max(worst, detail::bottleneck_class(a[c], b[c]));
  return worst;
}

/// Wasserstein distance under the same matching convention, solved exactly.
inline double wasserstein(const PersistenceDiagram& d1,
                          const PersistenceDiagram& d2) {
  const auto a = detail::split_by_class(d1);
  const auto b = detail::split_by_class(d2);
  double total = 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    total += detail::wasserstein_class(a[c], b[c]);
  return total;
}

}  // namespace topocomp
