#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <gtest/gtest.h>

namespace nvnmr::testing {

/// Seeded value generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(rng_); }

  template <class T>
  const T& pick(std::span<const T> items) {
    return items[static_cast<std::size_t>(integer(0, static_cast<long>(items.size()) - 1))];
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Runs `fn` on `cases` independently seeded generators. A failure message
/// carries the case index and seed so it can be replayed alone.
template <class Fn>
void for_all(int cases, std::uint64_t seed, Fn&& fn) {
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t s = seed * 1000003u + static_cast<std::uint64_t>(i);
    SCOPED_TRACE("property case " + std::to_string(i) + " seed " + std::to_string(s));
    Gen g(s);
    fn(g);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace nvnmr::testing
