#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ifsynth/core/tensor.h"

namespace ifsynth {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// reproducible bit-for-bit across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0,1)
  double uniform() { return (double)(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // inclusive range
  i64 uniform_int(i64 lo, i64 hi) {
    uint64_t span = (uint64_t)(hi - lo + 1);
    return lo + (i64)(next_u64() % span);
  }

  // Box-Muller with a cached second draw; cache is part of serialized state.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  void fill_normal(Tensor& t, double mu = 0.0, double sigma = 1.0) {
    for (auto& v : t.data) v = mu + sigma * normal();
  }

  // Independent child stream; does not advance this stream.
  Rng fork(uint64_t stream) const {
    uint64_t x = s_[0] ^ rotl(s_[2], 29) ^ (stream * 0x9e3779b97f4a7c15ull);
    return Rng(splitmix64(x));
  }

  std::vector<double> shuffled_indices(i64 n) {
    std::vector<double> idx(n);
    for (i64 i = 0; i < n; ++i) idx[(size_t)i] = (double)i;
    for (i64 i = n - 1; i > 0; --i) {
      i64 j = uniform_int(0, i);
      std::swap(idx[(size_t)i], idx[(size_t)j]);
    }
    return idx;
  }

  std::array<uint64_t, 6> serialize() const {
    return {s_[0], s_[1], s_[2], s_[3], has_cached_ ? 1ull : 0ull,
            std::bit_cast<uint64_t>(cached_)};
  }
  static Rng deserialize(const std::array<uint64_t, 6>& w) {
    Rng r(0);
    r.s_ = {w[0], w[1], w[2], w[3]};
    r.has_cached_ = w[4] != 0;
    r.cached_ = std::bit_cast<double>(w[5]);
    return r;
  }

 private:
  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> s_{};
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace ifsynth
