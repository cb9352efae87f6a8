#pragma once

// SplitMix64 streams. The generator is counter based: output k of a stream
// is mix(key + (k + 1) * golden_gamma), so a stream is fully determined by
// its 64-bit key. Substream keys are derived by mixing (parent key, index),
// which makes per-source / per-start generation reproducible regardless of
// scheduling.

#include <cmath>
#include <cstdint>
#include <limits>

namespace cpdkit {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'c0de'2024'0001ULL;

class SplitMixStream {
 public:
  using result_type = std::uint64_t;

  explicit SplitMixStream(std::uint64_t seed = kDefaultSeed) noexcept : key_(mix(seed)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  // Independent child stream; does not advance this stream.
  SplitMixStream substream(std::uint64_t index) const noexcept {
    SplitMixStream child;
    child.key_ = mix(key_ ^ mix(index + 0x632b'e59b'd9b4'e019ULL));
    child.counter_ = 0;
    return child;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_open0() noexcept { return 1.0 - uniform01(); }

  double exponential(double rate) noexcept { return -std::log(uniform_open0()) / rate; }

  // Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection.
    while (true) {
      const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= bound || low >= (-bound) % bound) return static_cast<std::uint64_t>(m >> 64);
    }
  }

  int sign() noexcept { return ((*this)() >> 63) ? 1 : -1; }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e37'79b9'7f4a'7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58'476d'1ce4'e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d0'49bb'1331'11ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace cpdkit
