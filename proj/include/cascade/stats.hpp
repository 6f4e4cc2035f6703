#pragma once

// Monte-Carlo harness: goodness of fit of the production samplers against
// the exact without-replacement law, and the key-precision experiment for
// the random-key method.

#include "cascade/core.hpp"
#include "cascade/oracle.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cascade::stats {

enum class SamplerKind { Cascade, WithReplacement, Exponent, Oversample };

std::string_view to_string(SamplerKind kind);
std::optional<SamplerKind> parse_sampler_kind(std::string_view text);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square of observed counts against cell probabilities. Cells
/// with expected count below 5 are pooled, smallest first. An observation
/// in a zero-probability cell gives an infinite statistic and p-value 0.
ChiSquare chi_square(std::span<const std::uint64_t> observed,
                     std::span<const double> probabilities, std::uint64_t trials);

/// Total-variation distance between empirical frequencies and a law.
double tv_distance(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                   std::uint64_t trials);

/// Expected TV distance of an empirical law from the true law after
/// `trials` draws: sum over cells of E|p_hat - p| / 2, each term the normal
/// approximation sqrt(2 p (1 - p) / (pi N)) capped at 2 p (1 - p).
double tv_noise_floor(std::span<const double> probabilities, std::uint64_t trials);

struct StatReport {
  SamplerKind sampler = SamplerKind::Cascade;
  std::uint64_t trials = 0;
  /// "ordered" (cells are ordered k-tuples) or "marginal" (first-coordinate
  /// marginal plus per-element inclusion tests, used for large k).
  std::string cells;
  ChiSquare chi_square;
  double tv_distance = 0.0;
  double noise_floor = 0.0;
  double significance = 0.0;
  /// Smallest inclusion-test p-value (marginal cells only).
  std::optional<double> min_inclusion_p;
  bool pass = false;
};

struct GofConfig {
  SamplerKind sampler = SamplerKind::Cascade;
  /// Stream in arrival order; element i has id i.
  std::vector<ExactWeight> weights;
  std::size_t k = 1;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  double significance = 0.001;
  WeightMode mode = WeightMode::ExactInteger;
  int mantissa_bits = 53;
  std::uint64_t oversample_draw_cap = std::uint64_t{1} << 40;
};

/// Runs `trials` independent samplers (trial t seeded with
/// derive_seed(seed, t)) and tests their output law against analytic_swor.
/// Throws InvalidConfig for trials < 1000, an empty stream or k > n.
StatReport gof_test(const GofConfig& config);

/// Ordered outcome counts over `trials` runs; the building block of
/// gof_test, exposed for tests that need raw frequencies.
std::map<oracle::Outcome, std::uint64_t> sample_outcomes(const GofConfig& config);

struct PrecisionRow {
  int mantissa_bits = 0;
  double tv_distance = 0.0;
};

struct PrecisionReport {
  std::uint64_t trials = 0;
  double cascade_tv = 0.0;
  double noise_floor = 0.0;
  /// Three times the noise floor.
  double threshold = 0.0;
  std::vector<PrecisionRow> exponent;
};

/// TV distance from the exact law of cascade sampling (integer mode) and of
/// the random-key method at each key precision, on the same trial budget.
PrecisionReport precision_experiment(const std::vector<ExactWeight>& weights, std::size_t k,
                                     const std::vector<int>& mantissa_bits, std::uint64_t trials,
                                     std::uint64_t seed);

std::vector<ExactElement> make_stream(const std::vector<ExactWeight>& weights);

}  // namespace cascade::stats
