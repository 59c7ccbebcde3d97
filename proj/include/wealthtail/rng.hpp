#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wealthtail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based derivation of an independent seed for stream `stream` of a
/// master seed. Replications seeded this way give identical draws no matter
/// how they are scheduled over threads.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
}

/// mt19937_64 with hand-derived variates. The engine is fully specified by
/// the standard; deriving uniforms from raw bits keeps sequences identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(bits() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; never returns 0, so u^{-1/alpha} never overflows.
  double uniform_open_closed() { return 1.0 - uniform01(); }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (one variate per call).
  double normal() {
    const double u1 = uniform_open_closed();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wealthtail
