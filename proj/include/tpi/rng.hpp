#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

// Self-contained generators so that a batch seed means the same byte
// stream on every platform and standard library. std::mt19937 plus the
// std distributions would not give that guarantee.

namespace tpi::rng {

/// splitmix64; used for seeding and for deriving substream seeds.
struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// Seed for the index-th substream of a master seed. Substreams are the
/// consecutive outputs of the master splitmix64 stream, so chunked
/// sampling is reproducible independent of chunk scheduling.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 sm{master + 0x9E3779B97F4A7C15ULL * index};
  return sm.next();
}

/// xoshiro256++ main generator.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// Uniform in [0, 1) with 53-bit resolution.
inline double uniform01(Xoshiro256pp& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal pair, Box-Muller. Fixed draw count per call keeps
/// streams aligned across implementations.
inline std::pair<double, double> normal_pair(Xoshiro256pp& g) {
  const double u1 = 1.0 - uniform01(g);  // (0, 1]; keeps the log finite
  const double u2 = uniform01(g);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace tpi::rng
