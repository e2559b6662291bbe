#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mmgest {

// splitmix64; used to derive independent sub-seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic generator. The engine is the standard-specified mt19937_64;
// all distributions are implemented here rather than via <random>'s
// distribution templates, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  // Box-Muller; one normal per two engine draws.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Knuth's product method; adequate for the small rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  // Partial Fisher-Yates: the first k entries end up uniformly drawn.
  template <typename T>
  void partial_shuffle(std::vector<T>& v, std::size_t k) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(uniform_index(n - i));
      std::swap(v[i], v[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    partial_shuffle(v, v.size());
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace mmgest
