#pragma once

#include <cmath>
#include <cstdint>

namespace drn {

/// Counter-based pseudo-random generator: output i is the splitmix64
/// finalizer applied to (seed, i), so a given seed yields the same stream
/// on every platform and the stream can be regenerated from any position.
/// std::random distributions are avoided on purpose; their algorithms are
/// implementation-defined and would break cross-platform reproducibility.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  uint64_t next_u64() { return mix(seed_ ^ mix(counter_++)); }

  /// Uniform double in (0, 1]. Never returns 0, so it is log-safe.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform double in [-1, 1).
  double next_signed_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-52 - 1.0;
  }

  /// Unbiased uniform integer in [0, n), n >= 1. Rejection sampling keeps
  /// the draw exact; the loop terminates with overwhelming probability.
  uint64_t next_below(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t threshold = (0ULL - n) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller on two counter draws.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace drn
