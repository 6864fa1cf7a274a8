#pragma once

// Seeded quasi-random sample points on chart x fiber.
//
// Halton points in 3n dimensions (x, y, flag direction v), each coordinate
// shifted by a Cranley-Patterson rotation drawn from mt19937_64(seed).
// Raw generator bits are mapped to doubles here rather than through
// <random> distributions, whose output is implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "finslerlab/error.hpp"
#include "finslerlab/jets.hpp"

namespace finslerlab {

struct SamplePlan {
  int count = 20;
  std::uint64_t seed = 0;
  double fiber_floor = kDefaultFiberFloor;
  double margin = 0.1;  // fraction of each box side kept clear
};

struct Sample {
  int index = 0;
  Vec x;
  Vec y;
  Vec v;  // second flag direction, not parallel to y
};

inline double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

inline int nth_prime(int k) {
  int count = -1;
  for (int p = 2;; ++p) {
    bool prime = true;
    for (int d = 2; d * d <= p; ++d)
      if (p % d == 0) {
        prime = false;
        break;
      }
    if (prime && ++count == k) return p;
  }
}

inline double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

inline std::vector<Sample> draw_samples(const Box& domain, const SamplePlan& plan) {
  const int n = domain.dim();
  if (plan.count < 1) throw ConfigError("samples: count must be at least 1");
  if (!(plan.margin >= 0.0 && plan.margin < 0.5)) throw ConfigError("samples: margin must lie in [0, 0.5)");
  std::mt19937_64 rng(plan.seed);
  std::vector<double> shift(static_cast<std::size_t>(3 * n));
  for (double& s : shift) s = unit_from_bits(rng());
  std::vector<int> bases;
  for (int d = 0; d < 3 * n; ++d) bases.push_back(nth_prime(d));

  const double y_floor = std::max(0.25, plan.fiber_floor);
  std::vector<Sample> out;
  for (std::uint64_t k = 1; static_cast<int>(out.size()) < plan.count; ++k) {
    if (k > static_cast<std::uint64_t>(plan.count) * 1000 + 1000) throw Error("samples: rejection sampling stalled");
    auto u = [&](int d) {
      double v = halton(k, bases[static_cast<std::size_t>(d)]) + shift[static_cast<std::size_t>(d)];
      return v - std::floor(v);
    };
    Sample s;
    s.index = static_cast<int>(out.size());
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double t = plan.margin + (1.0 - 2.0 * plan.margin) * u(i);
      s.x.push_back(domain.lower[ui] + t * (domain.upper[ui] - domain.lower[ui]));
      s.y.push_back(2.0 * u(n + i) - 1.0);
      s.v.push_back(2.0 * u(2 * n + i) - 1.0);
    }
    const double ny = euclidean_norm(s.y), nv = euclidean_norm(s.v);
    if (ny < y_floor || nv < y_floor) continue;
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += s.y[static_cast<std::size_t>(i)] * s.v[static_cast<std::size_t>(i)];
    const double cos2 = dot * dot / (ny * ny * nv * nv);
    if (cos2 > 0.99) continue;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace finslerlab
