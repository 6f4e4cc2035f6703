#include "cascade/bench.hpp"

#include "cascade/cascade.hpp"
#include "cascade/random.hpp"
#include "cascade/unit.hpp"

#include <chrono>

namespace cascade::bench {

std::string_view to_string(WeightDistribution distribution) {
  switch (distribution) {
    case WeightDistribution::Uniform: return "uniform";
    case WeightDistribution::Zipf: return "zipf";
    case WeightDistribution::OneDominant: return "one-dominant";
  }
  return "unknown";
}

std::optional<WeightDistribution> parse_weight_distribution(std::string_view text) {
  if (text == "uniform") return WeightDistribution::Uniform;
  if (text == "zipf") return WeightDistribution::Zipf;
  if (text == "one-dominant") return WeightDistribution::OneDominant;
  return std::nullopt;
}

std::vector<ExactWeight> synthetic_weights(std::size_t n, WeightDistribution distribution,
                                           std::uint64_t seed) {
  RandomSource rng(derive_seed(seed, 0xbe9c4));
  std::vector<ExactWeight> weights;
  weights.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (distribution) {
      case WeightDistribution::Uniform:
        weights.emplace_back(1 + rng.uniform_below(std::uint64_t{1000}));
        break;
      case WeightDistribution::Zipf:
        weights.emplace_back((std::uint64_t{1} << 20) / (1 + rng.uniform_below(std::uint64_t{1} << 20)));
        break;
      case WeightDistribution::OneDominant:
        weights.emplace_back(i == 0 ? std::uint64_t{1} << 40 : 1);
        break;
    }
  }
  return weights;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <SamplerWeight W>
std::vector<WeightedElement<W>> make_elements(const std::vector<ExactWeight>& weights) {
  std::vector<WeightedElement<W>> elements;
  elements.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if constexpr (std::same_as<W, ExactWeight>) {
      elements.push_back({ElementId{i}, weights[i]});
    } else {
      elements.push_back({ElementId{i}, to_double(weights[i])});
    }
  }
  return elements;
}

template <SamplerWeight W>
BenchReport run(const BenchConfig& config) {
  BenchReport report;
  report.config = config;
  if (config.n == 0) return report;
  const auto elements = make_elements<W>(synthetic_weights(config.n, config.distribution, config.seed));

  {
    UnitSampler<W> unit;
    RandomSource rng(derive_seed(config.seed, 0));
    const auto start = Clock::now();
    for (const auto& e : elements) unit.feed(e, rng);
    report.unit_seconds = seconds_since(start);
  }

  for (std::size_t k : config.k_values) {
    CascadeSampler<UnitSampler<W>> sampler(k, config.seed);
    std::size_t peak_bytes = sampler.state_bytes();
    const auto start = Clock::now();
    for (const auto& e : elements) sampler.feed(e);
    BenchRow row;
    row.k = k;
    row.seconds = seconds_since(start);
    row.ns_per_element = row.seconds * 1e9 / static_cast<double>(config.n);
    // Level totals only grow, so the final state is the largest.
    row.state_bytes = std::max(peak_bytes, sampler.state_bytes());
    if (!report.rows.empty()) {
      const auto& previous = report.rows.back();
      row.time_ratio = row.seconds / previous.seconds;
      row.size_ratio = static_cast<double>(row.state_bytes) / static_cast<double>(previous.state_bytes);
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
  for (std::size_t k : config.k_values) {
    if (k == 0) throw Error(ErrorCode::InvalidConfig, "every k must be at least 1");
  }
  return config.mode == WeightMode::ExactInteger ? run<ExactWeight>(config) : run<FloatWeight>(config);
}

}  // namespace cascade::bench
