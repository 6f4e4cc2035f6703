#pragma once

#include "cascade/core.hpp"

#include <cstdint>
#include <random>

namespace cascade {

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` of `master`: levels of a cascade, trials of
/// an experiment. Fixed rule, so a master seed replays every child.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Seeded randomness source. Variates are built from raw 64-bit engine
/// output rather than std distributions, so results are identical across
/// standard library implementations.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound); bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);
  BigInt uniform_below(const BigInt& bound);

  /// Uniform on the 53-bit grid of [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe to take a logarithm of.
  double uniform_open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// True with probability weight / total.
  ///
  /// Integer weights draw u uniformly from [0, total) and accept iff
  /// u < weight, so the decision is a single exact comparison.
  bool accept(const ExactWeight& weight, const ExactWeight& total);
  bool accept(FloatWeight weight, FloatWeight total) { return uniform01() < weight / total; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

template <class S, class W>
concept DecisionSource = SamplerWeight<W> && requires(S& source, const W& w) {
  { source.accept(w, w) } -> std::convertible_to<bool>;
};

}  // namespace cascade
