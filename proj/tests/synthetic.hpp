// Deterministic synthetic fields shared by the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <limits>
#include <random>
#include <vector>

#include "topocomp/scalar_field.hpp"

namespace testfields {

using topocomp::Dims3;
using topocomp::ScalarField;
using topocomp::VertexId;

inline ScalarField make_ramp(Dims3 dims) {
  const std::size_t n =
      std::size_t(dims[0]) * dims[1] * dims[2];
  std::vector<double> values(n);
  for (std::size_t v = 0; v < n; ++v) values[v] = double(v);
  return topocomp::build_field(dims, std::move(values));
}

inline ScalarField make_constant(Dims3 dims, double c) {
  const std::size_t n = std::size_t(dims[0]) * dims[1] * dims[2];
  return topocomp::build_field(dims, std::vector<double>(n, c));
}

inline ScalarField make_uniform_random(Dims3 dims, std::uint64_t seed,
                                       double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  const std::size_t n = std::size_t(dims[0]) * dims[1] * dims[2];
  std::vector<double> values(n);
  for (auto& v : values) v = dist(rng);
  return topocomp::build_field(dims, std::move(values));
}

// Small-integer-valued field; produces plenty of exact value ties.
inline ScalarField make_tied_random(Dims3 dims, std::uint64_t seed,
                                    int levels = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, levels - 1);
  const std::size_t n = std::size_t(dims[0]) * dims[1] * dims[2];
  std::vector<double> values(n);
  for (auto& v : values) v = double(dist(rng));
  return topocomp::build_field(dims, std::move(values));
}

inline void box_blur(std::vector<double>& values, Dims3 dims, int passes) {
  std::vector<double> tmp(values.size());
  for (int pass = 0; pass < passes; ++pass) {
    for (int axis = 0; axis < 3; ++axis) {
      if (dims[axis] < 2) continue;
      const std::size_t stride =
          axis == 0 ? 1
                    : (axis == 1 ? dims[0] : std::size_t(dims[0]) * dims[1]);
      const std::uint32_t extent = dims[axis];
      for (std::size_t v = 0; v < values.size(); ++v) {
        std::size_t rest = v;
        std::uint32_t coord;
        if (axis == 0) coord = std::uint32_t(rest % dims[0]);
        else if (axis == 1) coord = std::uint32_t((rest / dims[0]) % dims[1]);
        else coord = std::uint32_t(rest / (std::size_t(dims[0]) * dims[1]));
        double acc = values[v];
        int cnt = 1;
        if (coord > 0) { acc += values[v - stride]; ++cnt; }
        if (coord + 1 < extent) { acc += values[v + stride]; ++cnt; }
        tmp[v] = acc / cnt;
      }
      values.swap(tmp);
    }
  }
}

// Sum of random Gaussian bumps plus optional blurred noise. Produces fields
// with a controllable number of topological features.
inline ScalarField make_bumps(Dims3 dims, std::uint64_t seed, int n_bumps,
                              double noise_amp = 0.0, int blur_passes = 2) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = std::size_t(dims[0]) * dims[1] * dims[2];

  struct Bump { double cx, cy, cz, amp, inv2s2; };
  std::vector<Bump> bumps(n_bumps);
  for (auto& b : bumps) {
    b.cx = unit(rng) * dims[0];
    b.cy = unit(rng) * dims[1];
    b.cz = dims[2] > 1 ? unit(rng) * dims[2] : 0.0;
    b.amp = (unit(rng) * 2.0 - 1.0) * (0.5 + unit(rng));
    const double sigma = (0.08 + 0.22 * unit(rng)) *
                         std::max({dims[0], dims[1], dims[2]});
    b.inv2s2 = 1.0 / (2.0 * sigma * sigma);
  }

  std::vector<double> values(n, 0.0);
  for (std::uint32_t z = 0; z < dims[2]; ++z)
    for (std::uint32_t y = 0; y < dims[1]; ++y)
      for (std::uint32_t x = 0; x < dims[0]; ++x) {
        double acc = 1e-3 * x + 7e-4 * y + 3e-4 * z;  // mild tilt
        for (const auto& b : bumps) {
          const double dx = x - b.cx, dy = y - b.cy, dz = z - b.cz;
          acc += b.amp * std::exp(-(dx * dx + dy * dy + dz * dz) * b.inv2s2);
        }
        values[std::size_t(x) + dims[0] * (y + std::size_t(dims[1]) * z)] = acc;
      }

  if (noise_amp > 0.0) {
    std::vector<double> noise(n);
    for (auto& v : noise) v = (unit(rng) * 2.0 - 1.0) * noise_amp;
    box_blur(noise, dims, blur_passes);
    for (std::size_t v = 0; v < n; ++v) values[v] += noise[v];
  }
  return topocomp::build_field(dims, std::move(values));
}

inline ScalarField scramble_offsets(ScalarField f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(f.offsets.begin(), f.offsets.end(), rng);
  return f;
}

// Order-preserving perturbation: adds bounded noise, then restores the
// original total order with a monotone pass. Keeps |g - f| <= amp.
inline ScalarField perturb_keep_order(const ScalarField& f, double amp,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  ScalarField g = f;
  for (auto& v : g.values) v += dist(rng);
  const topocomp::VertexOrder order = topocomp::build_order(f);
  for (std::size_t i = 1; i < order.sorted.size(); ++i) {
    const VertexId prev = order.sorted[i - 1];
    const VertexId cur = order.sorted[i];
    if (g.values[cur] <= g.values[prev])
      g.values[cur] =
          std::nextafter(g.values[prev], std::numeric_limits<double>::infinity());
  }
  return g;
}

}  // namespace testfields
