#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace bdlle {

/// Counter-based SplitMix64 stream.
///
/// A stream is identified by (seed, name). Its key is
/// mix(seed ^ mix(fnv1a(name))) and its i-th output is mix(key + (i+1) * G)
/// with G the 64-bit golden-ratio increment. Different names give
/// statistically independent streams under one seed, so adding draws to one
/// stream never shifts another.
class RandomStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  RandomStream(std::uint64_t seed, std::string_view name) : key_(mix(seed ^ mix(fnv1a(name)))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : s) {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::uint64_t next() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by the Box-Muller transform; values come in pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bdlle
