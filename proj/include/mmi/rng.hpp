#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mmi/tensor.hpp"

namespace mmi {

/// Deterministic RNG. All distribution transforms are written out explicitly
/// (std:: distributions are implementation-defined) so that identical seeds
/// give identical streams on any platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0,1).
  real uniform() {
    return static_cast<real>(gen_() >> 11) * 0x1.0p-53;
  }

  real uniform(real lo, real hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  real normal() {
    real u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    real u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  real normal(real mean, real stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n). n must be > 0.
  int randint(int n) { return static_cast<int>(gen_() % static_cast<uint64_t>(n)); }

  /// Fisher-Yates shuffle with an explicit index draw.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(gen_() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Derives an independent stream seed from a base seed and a tag.
  static uint64_t derive(uint64_t seed, uint64_t stream) {
    // splitmix64 finalizer over the pair
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static uint64_t derive(uint64_t seed, const std::string& tag) {
    uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : tag) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return derive(seed, h);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mmi
