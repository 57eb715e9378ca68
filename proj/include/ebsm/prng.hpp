// Deterministic xorshift64star generator. The recurrence is normative so
// traces replay bit-exactly across platforms and implementations.
#pragma once

#include <cstdint>

namespace ebsm {

class Prng {
 public:
  // Zero would lock the recurrence at zero; remap it to a fixed odd constant.
  static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

  explicit Prng(std::uint64_t seed)
      : state_(seed == 0 ? kZeroSeedReplacement : seed) {}

  std::uint64_t next() {
    std::uint64_t s = state_;
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    state_ = s;
    return s * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform-ish draw in 0..n inclusive (output mod n+1).
  std::int64_t draw_in_range(std::int64_t n) {
    return static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(n + 1));
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace ebsm
