#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace percnet {

// Seedable, splittable generator. All randomness in the library flows from a
// 64-bit seed; substreams are derived by hashing (seed, tag) so modules can be
// re-run independently without sharing state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a,
                                 std::uint64_t tag_b) {
  return derive_seed(derive_seed(seed, tag_a), tag_b);
}

// xoshiro256** by Blackman & Vigna, seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) {
      sm = splitmix64(sm);
      w = sm;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n) without modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Exact Poisson sample: counts unit-rate exponential arrivals up to mean.
  // O(mean), which is the same cost as consuming the points it models.
  std::uint64_t poisson(double mean) {
    if (mean < 0) throw std::invalid_argument("poisson: mean must be >= 0");
    std::uint64_t count = 0;
    double acc = 0.0;
    for (;;) {
      double u = uniform();
      if (u <= 0.0) u = 0x1.0p-53;
      acc += -std::log(u);
      if (acc > mean) break;
      ++count;
    }
    return count;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace percnet
