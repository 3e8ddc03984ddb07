// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ntwistor/expr.hpp"

namespace ntw {

/// Deterministic xorshift-free PRNG wrapper: mt19937_64 with a fixed
/// 53-bit uniform mapping, so streams are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed * 6364136223846793005ULL + 1442695040888963407ULL) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

/// Axis-aligned sample box in R^m.
struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box bounds size mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] < hi[i])) throw std::invalid_argument("box requires lo < hi");
  }

  /// [-1,1]^m
  static Box unit(int m) {
    return Box(std::vector<double>(static_cast<std::size_t>(m), -1.0),
               std::vector<double>(static_cast<std::size_t>(m), 1.0));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  std::vector<Point> sample(int count, std::uint64_t seed) const {
    Rng rng(seed);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      Point p(lo.size());
      for (std::size_t k = 0; k < lo.size(); ++k) p[k] = rng.uniform(lo[k], hi[k]);
      pts.push_back(std::move(p));
    }
    return pts;
  }
};

}  // namespace ntw
