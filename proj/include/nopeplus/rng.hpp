#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace nopeplus {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic, platform-independent generator (xoshiro256++ seeded by
/// splitmix64). All pipeline randomness flows through this type so runs are
/// bit-reproducible regardless of the standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    for (auto& w : state_) w = splitmix64(s);
  }

  /// Derive an independent stream from a root seed and a stream tag.
  /// Used for the per-phase / per-step counter scheme.
  static Rng stream(uint64_t root_seed, uint64_t tag, uint64_t counter = 0) {
    uint64_t s = root_seed;
    uint64_t a = splitmix64(s) ^ (tag * 0xD1342543DE82EF95ull);
    uint64_t b = a ^ (counter * 0x9E6C63D0876A9A47ull);
    return Rng(b);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (portable, no stdlib distributions).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 1e-300);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct indices drawn from [0, n) (k <= n), in draw order.
  std::vector<size_t> sample_indices(size_t n, size_t k) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    if (k >= n) return idx;
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + static_cast<size_t>(uniform_int(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fixed stream tags so every phase draws from an independent substream of
// the root seed, making ablations share identical data-order randomness.
namespace rng_tag {
constexpr uint64_t kSynth = 1;
constexpr uint64_t kInit = 2;
constexpr uint64_t kLocal = 3;
constexpr uint64_t kTrackInit = 4;
constexpr uint64_t kGlobal = 5;
constexpr uint64_t kEval = 6;
}  // namespace rng_tag

}  // namespace nopeplus
