#pragma once

// Deterministic randomness. Everything that draws random numbers in this
// codebase goes through Rng below: std::mt19937_64 is bit-exactly specified by
// the standard, but the std <random> *distributions* are not, so we roll the
// few distributions we need by hand. Substreams are derived from (seed, stream
// id) with splitmix64 so per-object / per-mask work is order-independent.

#include <cmath>
#include <cstdint>
#include <random>

namespace lrdet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stable substream key: mixes a user seed with a stream index.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(substream_seed(seed, stream));
  }

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // log-uniform in [lo, hi), lo > 0
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // unbiased uniform integer in [0, n), n >= 1 (masked rejection)
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = ~0ULL >> __builtin_clzll((n - 1) | 1);
    for (;;) {
      std::uint64_t v = engine_() & mask;
      if (v < n) return v;
    }
  }

  // Exact Poisson. Knuth's product method underflows past lambda ~700, so
  // large lambda is split additively (a sum of independent Poissons is
  // Poisson in the summed rate). O(lambda) uniform draws; fine at desk scale.
  std::uint64_t poisson(double lambda) {
    std::uint64_t total = 0;
    while (lambda > 30.0) {
      total += poisson_small(30.0);
      lambda -= 30.0;
    }
    return total + poisson_small(lambda);
  }

 private:
  std::uint64_t poisson_small(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

  std::mt19937_64 engine_;
};

}  // namespace lrdet
