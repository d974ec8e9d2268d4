#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace dhpp {

// All randomized behavior in this project flows through the generators below
// rather than <random>, because the standard distributions are not specified
// bit-for-bit across implementations. Scenario files record kRngTag so a
// result can always be traced back to the sampling procedure that made it.
inline constexpr const char* kRngTag = "splitmix64+xoshiro256**:v1";

// Seed expander (Vigna's splitmix64). Also used to derive event seeds.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

// xoshiro256** 1.0, seeded through splitmix64.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, bound) without modulo bias (Lemire's method).
  std::uint64_t next_below(std::uint64_t bound) {
    unsigned __int128 m =
        static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(bound);
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = -bound % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(bound);
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

// Draws `count` distinct values from {0, ..., population-1}; result sorted
// ascending. Partial Fisher-Yates, so the draw order is reproducible.
inline std::vector<int> sample_without_replacement(Xoshiro256StarStar& rng, int population,
                                                   int count) {
  std::vector<int> pool(population);
  for (int i = 0; i < population; ++i) pool[i] = i;
  std::vector<int> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(population - i)));
    std::swap(pool[i], pool[i + j]);
    out.push_back(pool[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dhpp
