#pragma once

#include "cascade/core.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace cascade::bench {

/// Synthetic weight laws:
///   uniform      - integers uniform in [1, 1000];
///   zipf         - floor(2^20 / r) with r uniform in [1, 2^20], heavy tailed;
///   one-dominant - the first element weighs 2^40, every other element 1.
enum class WeightDistribution { Uniform, Zipf, OneDominant };

std::string_view to_string(WeightDistribution distribution);
std::optional<WeightDistribution> parse_weight_distribution(std::string_view text);

std::vector<ExactWeight> synthetic_weights(std::size_t n, WeightDistribution distribution,
                                           std::uint64_t seed);

struct BenchConfig {
  std::size_t n = 1'000'000;
  std::vector<std::size_t> k_values{1, 2, 4, 8, 16};
  WeightMode mode = WeightMode::ExactInteger;
  WeightDistribution distribution = WeightDistribution::Uniform;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::size_t k = 0;
  double seconds = 0.0;
  double ns_per_element = 0.0;
  std::size_t state_bytes = 0;
  /// Relative to the previous row; 1 for the first row.
  double time_ratio = 1.0;
  double size_ratio = 1.0;
};

struct BenchReport {
  BenchConfig config;
  /// Wall time of a bare unit sampler over the same stream.
  double unit_seconds = 0.0;
  std::vector<BenchRow> rows;
};

/// Times one cascade per k over the same synthetic stream (generated before
/// timing). n = 0 yields an empty table.
BenchReport run_bench(const BenchConfig& config);

}  // namespace cascade::bench
