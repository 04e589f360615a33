#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ckis {

/// Seedable deterministic generator. The engine is std::mt19937_64 (its output
/// sequence is pinned by the standard) and every distribution below is written
/// out explicitly, so a seed reproduces the same stream on any platform with
/// the same libm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on (0, 1]: 53 significant bits, never exactly zero.
  double uniform01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes exactly two engine draws.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  static constexpr const char* name() { return "mt19937_64+box-muller"; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ckis
