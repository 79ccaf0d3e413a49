/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_RNG_HPP
#define QSNOOP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qsnoop {

/// Counter-based seeded RNG with cheap stream splitting.
///
/// The normal/uniform draws are implemented by hand (Box-Muller on top of
/// splitmix64) so sequences are identical across standard libraries and
/// platforms, which the reproducibility guarantees depend on.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ULL)) {}

  /// Derive an independent stream for a sub-task, e.g. (bucket, repetition).
  [[nodiscard]] Rng split(uint64_t a, uint64_t b = 0, uint64_t c = 0) const {
    uint64_t s = state_;
    s = mix(s ^ mix(a + 0x8000000000000001ULL));
    s = mix(s ^ mix(b + 0x3243f6a8885a308dULL));
    s = mix(s ^ mix(c + 0x13198a2e03707344ULL));
    return Rng(FromState{}, s);
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  uint64_t next_below(uint64_t n) {
    // Modulo bias is negligible for the small n used here.
    return n == 0 ? 0 : next_u64() % n;
  }

  /// Standard normal via Box-Muller.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  double next_normal(double mean, double sigma) {
    return mean + sigma * next_normal();
  }

private:
  struct FromState {};
  Rng(FromState, uint64_t s) : state_(s) {}

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace qsnoop

#endif
