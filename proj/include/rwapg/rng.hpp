#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

namespace rwapg {

// Counter-based random number generation. Every draw is a pure function of
// (seed, stream, counter), so problem instances and initial iterates are
// reproducible bit-for-bit regardless of evaluation order. The mixer is the
// SplitMix64 finalizer, applied to a keyed counter.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t keyed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream ^ 0x5851f42d4c957f2dULL));
}

inline std::uint64_t raw(std::uint64_t key, std::uint64_t counter) {
  return mix64(key + counter * 0x9e3779b97f4a7c15ULL);
}

// Uniform on (0, 1]; never returns 0 so it is safe under log().
inline double uniform_pos(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>((raw(key, counter) >> 11) + 1) * 0x1.0p-53;
}

// Fills a vector with i.i.d. standard normal entries via Box-Muller on
// consecutive counters. A fresh (seed, stream) pair gives an independent
// fill.
inline Eigen::VectorXd normal_vector(std::uint64_t seed, std::uint64_t stream,
                                     Eigen::Index n) {
  const std::uint64_t key = keyed(seed, stream);
  Eigen::VectorXd out(n);
  const double two_pi = 2.0 * M_PI;
  std::uint64_t c = 0;
  for (Eigen::Index i = 0; i < n; i += 2) {
    const double u1 = uniform_pos(key, c++);
    const double u2 = uniform_pos(key, c++);
    const double mag = std::sqrt(-2.0 * std::log(u1));
    out[i] = mag * std::cos(two_pi * u2);
    if (i + 1 < n) out[i + 1] = mag * std::sin(two_pi * u2);
  }
  return out;
}

// Stream identifiers used by the problem generators.
inline constexpr std::uint64_t kStreamMatrix = 1;
inline constexpr std::uint64_t kStreamPowerIteration = 2;
inline constexpr std::uint64_t kStreamInitialBase = 1ULL << 32;

}  // namespace rng

}  // namespace rwapg
