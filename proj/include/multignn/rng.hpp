// Deterministic pseudo-random utilities used by every stochastic component:
// xoshiro256++ state initialized with splitmix64, unbiased bounded uniforms
// (Lemire rejection), and Box-Muller normal variates. The algorithm identity
// is recorded in output sidecars and checkpoints so that any artifact can be
// regenerated bit-for-bit from (algorithm name, seed) on any platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace multignn {

inline constexpr const char* kPrngName =
    "xoshiro256++(splitmix64-seeded)+box-muller v1";

// Stateless-style mixer; also used to derive independent sub-seeds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Derives a decorrelated seed for a named sub-stream (model init, batch
// order, ...) so that independent components never share a PRNG stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_tag) {
  SplitMix64 sm(seed ^ (0xA0761D6478BD642FULL * (stream_tag + 1)));
  return sm.next();
}

inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::string_view stream_name) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the stream name
  for (const char c : stream_name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return derive_seed(seed, h);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next_u64() {
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

  // [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // (0, 1]; safe as a logarithm argument.
  double uniform_open01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Box-Muller, cosine branch only; consumes exactly two raw draws so the
  // stream position is a pure function of the call count.
  double normal(double mean, double stddev) {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    return mean + stddev * radius * std::cos(kTwoPi * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

// In-place Fisher-Yates shuffle driven by the given stream.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace multignn
