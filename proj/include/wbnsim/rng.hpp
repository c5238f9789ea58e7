#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wbnsim {

// Deterministic 64-bit-seeded generator. The distribution transforms are
// implemented here (not via std:: distributions) so that a given seed yields
// the same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Exponential with the given rate (rate > 0).
  double exponential(double rate) {
    return -std::log1p(-uniform01()) / rate;
  }

  // Poisson count via cumulative unit-rate exponential arrivals; O(mean).
  std::uint64_t poisson(double mean) {
    std::uint64_t k = 0;
    double acc = exponential(1.0);
    while (acc < mean) {
      ++k;
      acc += exponential(1.0);
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wbnsim
