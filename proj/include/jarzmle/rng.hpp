#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "jarzmle/types.hpp"

namespace jarzmle {

// SplitMix64 step. Used both as a seeding helper and to fold several
// key words into one well-mixed 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Collapses (seed, a, b, c) into one stream key. Distinct tuples map to
// distinct keys for all practical purposes.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  s += a;
  k ^= splitmix64(s);
  s += b;
  k ^= splitmix64(s);
  s += c;
  k ^= splitmix64(s);
  return k;
}

// Purpose tags keeping the engine's sub-streams disjoint. Sub-streams are
// keyed by (seed, tag, iteration, particle) so a particle sweep draws the
// same noise whether it runs serially or in parallel.
namespace rng_tag {
inline constexpr std::uint64_t kInit = 0x11;
inline constexpr std::uint64_t kSweep = 0x22;
inline constexpr std::uint64_t kResample = 0x33;
inline constexpr std::uint64_t kThetaNoise = 0x44;
inline constexpr std::uint64_t kProbe = 0x55;
inline constexpr std::uint64_t kData = 0x66;
inline constexpr std::uint64_t kTune = 0x77;
}  // namespace rng_tag

// xoshiro256++ with SplitMix64 state expansion. Small enough to construct
// one per (particle, iteration) without noticeable cost.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) {
    std::uint64_t s = key;
    for (auto& w : state_) w = splitmix64(s);
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

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the spare draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Per-sweep stream factory: one stream per particle and one per scalar
// purpose, all derived from (seed, iteration).
struct SweepRng {
  std::uint64_t seed = 0;
  long iteration = 0;

  RngStream particle(Index i) const {
    return RngStream(stream_key(seed, rng_tag::kSweep,
                                static_cast<std::uint64_t>(iteration),
                                static_cast<std::uint64_t>(i)));
  }
  RngStream scalar(std::uint64_t tag) const {
    return RngStream(
        stream_key(seed, tag, static_cast<std::uint64_t>(iteration), 0));
  }
};

// Marsaglia-Tsang gamma draw (shape k, scale theta).
double gamma_draw(RngStream& rng, double shape, double scale);

}  // namespace jarzmle
