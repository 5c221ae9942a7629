#pragma once

#include <cstdint>
#include <random>

namespace plnav {

/// Deterministic random stream. Wraps mt19937_64 with scalar helpers so the
/// draw order is fixed by call order alone; std::normal_distribution is
/// avoided because its internal caching makes replay order
/// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return (gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  /// Standard normal via Box-Muller. Consumes exactly two uniforms per call;
  /// the second output of the pair is discarded to keep the stream stateless.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  uint64_t next_u64() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

/// Derives an independent stream seed from a base seed, splitmix64 style.
inline uint64_t mix_seed(uint64_t base, uint64_t stream) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace plnav
