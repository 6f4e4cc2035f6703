#include "cascade/stats.hpp"

#include "cascade/baselines.hpp"
#include "cascade/cascade.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace cascade::stats {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Cascade: return "cascade";
    case SamplerKind::WithReplacement: return "wr";
    case SamplerKind::Exponent: return "exponent";
    case SamplerKind::Oversample: return "oversample";
  }
  return "unknown";
}

std::optional<SamplerKind> parse_sampler_kind(std::string_view text) {
  if (text == "cascade") return SamplerKind::Cascade;
  if (text == "wr" || text == "with-replacement") return SamplerKind::WithReplacement;
  if (text == "exponent") return SamplerKind::Exponent;
  if (text == "oversample") return SamplerKind::Oversample;
  return std::nullopt;
}

ChiSquare chi_square(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                     std::uint64_t trials) {
  const auto n = static_cast<double>(trials);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] > 0.0) {
      order.push_back(i);
    } else if (observed[i] > 0) {
      return {std::numeric_limits<double>::infinity(), 0, 0.0};
    }
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return probabilities[a] < probabilities[b]; });

  struct Pool {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Pool> pools;
  Pool current;
  bool open = false;
  for (std::size_t i : order) {
    current.expected += probabilities[i] * n;
    current.observed += static_cast<double>(observed[i]);
    open = true;
    if (current.expected >= 5.0) {
      pools.push_back(current);
      current = {};
      open = false;
    }
  }
  if (open) {
    if (pools.empty()) {
      pools.push_back(current);
    } else {
      pools.back().expected += current.expected;
      pools.back().observed += current.observed;
    }
  }
  if (pools.size() < 2) return {};

  ChiSquare result;
  for (const auto& pool : pools) {
    const double diff = pool.observed - pool.expected;
    result.statistic += diff * diff / pool.expected;
  }
  result.dof = pools.size() - 1;
  result.p_value =
      boost::math::gamma_q(static_cast<double>(result.dof) / 2.0, result.statistic / 2.0);
  return result;
}

double tv_distance(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                   std::uint64_t trials) {
  double sum = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    sum += std::abs(static_cast<double>(observed[i]) / static_cast<double>(trials) - probabilities[i]);
  }
  return std::min(1.0, sum / 2.0);
}

double tv_noise_floor(std::span<const double> probabilities, std::uint64_t trials) {
  double sum = 0.0;
  for (double p : probabilities) {
    const double variance = p * (1.0 - p);
    sum += std::min(std::sqrt(2.0 * variance / (std::numbers::pi * static_cast<double>(trials))),
                    2.0 * variance);
  }
  return sum / 2.0;
}

std::vector<ExactElement> make_stream(const std::vector<ExactWeight>& weights) {
  std::vector<ExactElement> stream;
  stream.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) stream.push_back({ElementId{i}, weights[i]});
  return stream;
}

namespace {

template <SamplerWeight W>
std::vector<WeightedElement<W>> convert_stream(const std::vector<ExactElement>& stream) {
  if constexpr (std::same_as<W, ExactWeight>) {
    return stream;
  } else {
    std::vector<FloatElement> out;
    for (const auto& e : stream) out.push_back({e.id, to_double(e.weight)});
    return out;
  }
}

template <SamplerWeight W>
oracle::Outcome run_trial(const GofConfig& config, std::span<const WeightedElement<W>> stream,
                          std::uint64_t seed) {
  std::vector<WeightedElement<W>> sample;
  switch (config.sampler) {
    case SamplerKind::Cascade: {
      CascadeSampler<UnitSampler<W>> sampler(config.k, seed);
      for (const auto& e : stream) sampler.feed(e);
      sample = sampler.sample();
      break;
    }
    case SamplerKind::WithReplacement: {
      WithReplacementSampler<W> sampler(config.k, seed);
      for (const auto& e : stream) sampler.feed(e);
      sample = sampler.sample();
      break;
    }
    case SamplerKind::Exponent: {
      ExponentSampler<W> sampler(config.k, seed, config.mantissa_bits);
      for (const auto& e : stream) sampler.feed(e);
      sample = sampler.sample();
      break;
    }
    case SamplerKind::Oversample: {
      RandomSource rng(seed);
      sample = oversample<W>(stream, config.k, rng, config.oversample_draw_cap).sample;
      break;
    }
  }
  oracle::Outcome outcome;
  outcome.reserve(sample.size());
  for (const auto& e : sample) outcome.push_back(e.id);
  return outcome;
}

template <SamplerWeight W>
std::map<oracle::Outcome, std::uint64_t> count_outcomes(const GofConfig& config) {
  const auto stream = convert_stream<W>(make_stream(config.weights));
  std::map<oracle::Outcome, std::uint64_t> counts;
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    ++counts[run_trial<W>(config, stream, derive_seed(config.seed, t))];
  }
  return counts;
}

void validate(const GofConfig& config) {
  if (config.trials < 1000) throw Error(ErrorCode::InvalidConfig, "at least 1000 trials are required");
  if (config.weights.empty()) throw Error(ErrorCode::InvalidConfig, "stream must not be empty");
  if (config.k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
  if (config.k > config.weights.size()) {
    throw Error(ErrorCode::InvalidConfig, "goodness of fit needs k <= n");
  }
  for (const auto& w : config.weights) {
    if (w <= 0) throw Error(ErrorCode::NonPositiveWeight, "weights must be positive");
  }
  if (!(config.significance > 0.0 && config.significance < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "significance must lie in (0, 1)");
  }
}

std::uint64_t ordered_cell_count(std::size_t n, std::size_t k) {
  std::uint64_t cells = 1;
  for (std::size_t i = 0; i < k; ++i) cells *= n - i;
  return cells;
}

constexpr std::size_t kMaxOrderedK = 3;
constexpr std::uint64_t kMaxOrderedCells = 4096;

struct CellTable {
  std::vector<std::uint64_t> observed;
  std::vector<double> probabilities;
};

CellTable ordered_cells(const oracle::ExactDistribution& law,
                        const std::map<oracle::Outcome, std::uint64_t>& counts) {
  CellTable table;
  for (const auto& [outcome, mass] : law.masses()) {
    auto it = counts.find(outcome);
    table.observed.push_back(it == counts.end() ? 0 : it->second);
    table.probabilities.push_back(mass.convert_to<double>());
  }
  for (const auto& [outcome, count] : counts) {
    if (law.mass(outcome) == 0) {
      table.observed.push_back(count);
      table.probabilities.push_back(0.0);
    }
  }
  return table;
}

}  // namespace

std::map<oracle::Outcome, std::uint64_t> sample_outcomes(const GofConfig& config) {
  validate(config);
  return config.mode == WeightMode::ExactInteger ? count_outcomes<ExactWeight>(config)
                                                 : count_outcomes<FloatWeight>(config);
}

StatReport gof_test(const GofConfig& config) {
  const auto counts = sample_outcomes(config);
  const auto stream = make_stream(config.weights);
  const std::size_t n = stream.size();

  StatReport report;
  report.sampler = config.sampler;
  report.trials = config.trials;
  report.significance = config.significance;

  if (config.k <= kMaxOrderedK && ordered_cell_count(n, config.k) <= kMaxOrderedCells) {
    report.cells = "ordered";
    const auto table = ordered_cells(oracle::analytic_swor(stream, config.k), counts);
    report.chi_square = chi_square(table.observed, table.probabilities, config.trials);
    report.tv_distance = tv_distance(table.observed, table.probabilities, config.trials);
    report.noise_floor = tv_noise_floor(table.probabilities, config.trials);
    report.pass = report.chi_square.p_value >= config.significance;
    return report;
  }

  // First-coordinate marginal plus one binomial test per element's
  // inclusion probability, Bonferroni-corrected across the n + 1 tests.
  report.cells = "marginal";
  const double per_test = config.significance / static_cast<double>(n + 1);
  ExactWeight total = 0;
  for (const auto& w : config.weights) total += w;
  std::vector<double> first(n);
  for (std::size_t i = 0; i < n; ++i) first[i] = BigRational(config.weights[i], total).convert_to<double>();
  std::vector<std::uint64_t> first_observed(n, 0);
  std::vector<std::uint64_t> included(n, 0);
  std::uint64_t malformed = 0;
  for (const auto& [outcome, count] : counts) {
    if (outcome.size() != config.k) malformed += count;
    if (!outcome.empty()) first_observed[to_index(outcome.front())] += count;
    std::vector<bool> seen(n, false);
    for (auto id : outcome) {
      if (seen[to_index(id)]) {
        malformed += count;
        continue;
      }
      seen[to_index(id)] = true;
      included[to_index(id)] += count;
    }
  }
  report.chi_square = chi_square(first_observed, first, config.trials);
  report.tv_distance = tv_distance(first_observed, first, config.trials);
  report.noise_floor = tv_noise_floor(first, config.trials);

  const auto inclusion = oracle::inclusion_probabilities(stream, config.k);
  double min_p = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = inclusion[i].convert_to<double>();
    const double variance = static_cast<double>(config.trials) * p * (1.0 - p);
    const double diff = static_cast<double>(included[i]) - static_cast<double>(config.trials) * p;
    double p_value = 1.0;
    if (variance > 0.0) {
      p_value = std::erfc(std::abs(diff) / std::sqrt(2.0 * variance));
    } else if (diff != 0.0) {
      p_value = 0.0;
    }
    min_p = std::min(min_p, p_value);
  }
  report.min_inclusion_p = min_p;
  report.pass = malformed == 0 && report.chi_square.p_value >= per_test && min_p >= per_test;
  return report;
}

PrecisionReport precision_experiment(const std::vector<ExactWeight>& weights, std::size_t k,
                                     const std::vector<int>& mantissa_bits, std::uint64_t trials,
                                     std::uint64_t seed) {
  if (k > kMaxOrderedK) throw Error(ErrorCode::InvalidConfig, "precision experiment supports k <= 3");
  GofConfig config;
  config.weights = weights;
  config.k = k;
  config.trials = trials;
  config.seed = seed;
  validate(config);
  for (int bits : mantissa_bits) {
    if (bits < 1 || bits > kFullKeyPrecision) {
      throw Error(ErrorCode::InvalidConfig, "mantissa bits must lie in [1, 53]");
    }
  }

  const auto law = oracle::analytic_swor(make_stream(weights), k);
  PrecisionReport report;
  report.trials = trials;

  config.sampler = SamplerKind::Cascade;
  auto table = ordered_cells(law, sample_outcomes(config));
  report.cascade_tv = tv_distance(table.observed, table.probabilities, trials);
  report.noise_floor = tv_noise_floor(table.probabilities, trials);
  report.threshold = 3.0 * report.noise_floor;

  config.sampler = SamplerKind::Exponent;
  for (int bits : mantissa_bits) {
    config.mantissa_bits = bits;
    table = ordered_cells(law, sample_outcomes(config));
    report.exponent.push_back({bits, tv_distance(table.observed, table.probabilities, trials)});
  }
  return report;
}

}  // namespace cascade::stats
