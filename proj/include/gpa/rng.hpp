#pragma once

#include <cstdint>

namespace gpa {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based SplitMix64 substream.
///
/// The stream for (seed, index) starts at state `mix64(seed ^ mix64(index +
/// 0x632BE59BD9B4E019))`; the j-th draw (j = 1, 2, ...) is
/// `mix64(state + j * 0x9E3779B97F4A7C15)`. Every derived quantity below is
/// pinned so that results reproduce across implementations.
class Substream {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0x632BE59BD9B4E019ULL;

  constexpr Substream(std::uint64_t seed, std::uint64_t index) : state_(mix64(seed ^ mix64(index + kStreamSalt))) {}

  constexpr std::uint64_t next() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform in [0, bound) via the 128-bit multiply-shift reduction.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bit() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

}  // namespace gpa
