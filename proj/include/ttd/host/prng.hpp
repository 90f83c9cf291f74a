#pragma once

#include <cstdint>

namespace ttd::host {

// xorshift64* (Vigna): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.
// Outputs map to [0,1) through their top 53 bits.
class Prng {
 public:
  static constexpr uint64_t kMultiplier = 0x2545F4914F6CDD1DULL;
  // Replacement for a zero seed; the generator's state must never be zero.
  static constexpr uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

  Prng() = default;
  explicit Prng(uint64_t seed) { reset(seed); }

  void reset(uint64_t seed) { state_ = seed == 0 ? kZeroSeedReplacement : seed; }
  uint64_t state() const { return state_; }

  uint64_t next_u64() {
    uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * kMultiplier;
  }

  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  friend bool operator==(const Prng&, const Prng&) = default;

 private:
  uint64_t state_ = 1;
};

}  // namespace ttd::host
