#pragma once

#include <cmath>
#include <cstdint>

namespace rbr {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream.
///
/// Output i is mix64(key + i * golden), so a stream is fully determined by its
/// key and any number of streams can be drawn from in any order or on any
/// thread without coordination. Streams for different (seed, index) pairs use
/// keys hashed through mix64 twice, which keeps neighbouring indices apart.
///
/// Distributions are implemented here rather than through <random> so that
/// generated banks are identical across standard library implementations.
class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t index) noexcept
      : key_(mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + index)) {}

  std::uint64_t next() noexcept { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept {
    // Lemire's nearly-divisionless rejection method.
    unsigned __int128 prod = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        prod = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  /// Uniform double strictly inside (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the Marsaglia polar method; caches the spare draw.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform_open() - 1.0;
      v = 2.0 * uniform_open() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rbr
