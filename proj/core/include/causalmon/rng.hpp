#pragma once

// Counter-keyed random streams. Every random quantity in a simulated stream is
// drawn from a generator keyed by (seed, time index, purpose), so that
// resampling one purpose (e.g. treatment) never shifts the draws of another.

#include <cstdint>
#include <limits>
#include <string_view>

namespace causalmon {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a; used to turn purpose labels into stable integers.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) noexcept {
  return splitmix64_mix(seed ^ splitmix64_mix(a + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  return derive_seed(derive_seed(seed, a), b);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  return derive_seed(seed, hash_label(label));
}

/// SplitMix64 engine; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr SplitMix64(std::uint64_t seed, std::uint64_t index, std::uint64_t purpose) noexcept
      : state_(derive_seed(seed, index, purpose)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Uniform on [0, 1) with 53 random bits.
template <class Urbg>
double uniform01(Urbg& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Urbg>
int bernoulli(Urbg& rng, double p) {
  return uniform01(rng) < p ? 1 : 0;
}

/// Purpose tags for keyed draws.
namespace purpose {
inline constexpr std::uint64_t kCovariates = 1;
inline constexpr std::uint64_t kTreatment = 2;
inline constexpr std::uint64_t kOutcomeControl = 3;
inline constexpr std::uint64_t kOutcomeTreated = 4;
inline constexpr std::uint64_t kBootstrap = 5;
}  // namespace purpose

}  // namespace causalmon
