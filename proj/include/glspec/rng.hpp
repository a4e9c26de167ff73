#pragma once

#include <cstdint>

namespace glspec {

// SplitMix64 finalizer (Steele/Lea/Flood, as in java.util.SplittableRandom).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

// Key of sub-stream `index` under `seed`. All experiment randomness flows from
// one top-level seed; per-trial streams are derived with this so trials are
// reproducible independently of execution order.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64_mix((seed + kGoldenGamma) ^ splitmix64_mix(index + kGoldenGamma));
}

// Counter-based generator: sample i of a stream is a pure function of
// (key, i), so streams can be split or replayed at will.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept { return splitmix64_mix(key_ + (++counter_) * kGoldenGamma); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, bound).
  std::uint64_t next_index(std::uint64_t bound) noexcept {
    const auto v = static_cast<std::uint64_t>(next_double() * static_cast<double>(bound));
    return v >= bound ? bound - 1 : v;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace glspec
