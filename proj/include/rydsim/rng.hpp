#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace rydsim {

// SplitMix64 avalanche step. Used both as a seeding mixer and as the basis of
// the seed-derivation scheme, so that every stochastic operation can run from
// a stream seed that is a pure function of (master seed, stream label, index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable seed derivation: mixes the label hash and index through SplitMix64
// so that streams are independent of evaluation order and worker count.
inline std::uint64_t seed_derive(std::uint64_t master, std::string_view label,
                                 std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = master ^ fnv1a64(label);
  std::uint64_t b = splitmix64(s);
  s = a ^ (b + 0x9e3779b97f4a7c15ULL) ^ index;
  std::uint64_t out = splitmix64(s);
  return splitmix64(s) ^ out;
}

// xoshiro256++ with SplitMix64 seeding. Small, fast, and fully owned by the
// caller: no global state anywhere in the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (first component only; stateless per call).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Exponential waiting time; infinite when the rate vanishes.
  double exponential(double rate_per_us) {
    if (rate_per_us <= 0.0) return std::numeric_limits<double>::infinity();
    double u = uniform();
    return -std::log1p(-u) / rate_per_us;
  }

  long poisson(double mean);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Poisson quantile by sequential CDF inversion. Exact for the means used here
// (well below the exp underflow limit), and reusable with stratified uniforms.
inline long poisson_quantile(double mean, double u) {
  if (mean <= 0.0) return 0;
  double p = std::exp(-mean);
  double cdf = p;
  long n = 0;
  while (u > cdf && n < 100000) {
    ++n;
    p *= mean / static_cast<double>(n);
    cdf += p;
    if (p < 1e-300 && cdf >= 1.0 - 1e-12) break;
  }
  return n;
}

inline long Rng::poisson(double mean) { return poisson_quantile(mean, uniform()); }

}  // namespace rydsim
