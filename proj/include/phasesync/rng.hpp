#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace phasesync {

// splitmix64 step (Steele/Lea/Flood). Used only to expand seeds into
// generator state so that nearby seeds give unrelated streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Tags for the sub-streams derived from one instance seed. Every sampling
// routine draws from its own tagged stream, so adding draws to one stream
// never perturbs the others.
inline constexpr std::uint64_t kStreamGroundTruth = 1;
inline constexpr std::uint64_t kStreamNoise = 2;
inline constexpr std::uint64_t kStreamFallback = 3;
inline constexpr std::uint64_t kStreamZeroPolicy = 4;

// xoshiro256++ (Blackman/Vigna), seeded through a splitmix64 chain started
// at seed ^ ((tag + 1) * 2^64/phi). The integer stream is identical on every
// platform; floating-point payloads are deterministic for a given libm.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed, std::uint64_t stream_tag = 0) {
    std::uint64_t sm = seed ^ ((stream_tag + 1) * 0x9e3779b97f4a7c15ULL);
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
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

  // Uniform in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform01_inclusive() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // e^{2*pi*i*u} with u uniform in [0, 1).
  std::complex<double> unit_phase() {
    const double phi = 2.0 * std::numbers::pi * uniform01();
    return {std::cos(phi), std::sin(phi)};
  }

  // Standard complex normal: Re and Im each N(0, 1/2), so E|x|^2 = 1.
  // Box-Muller on two consecutive uniforms.
  std::complex<double> complex_normal() {
    const double r = std::sqrt(-std::log(uniform01_inclusive()));
    const double phi = 2.0 * std::numbers::pi * uniform01();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace phasesync
