#include "cascade/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace cascade::stats {

void PrintTo(SamplerKind kind, std::ostream* os) { *os << to_string(kind); }

namespace {

std::vector<ExactWeight> weights(std::initializer_list<unsigned long> list) {
  return {list.begin(), list.end()};
}

TEST(ChiSquare, KnownValue) {
  // (10 - 15)^2 / 15 * 2 = 10/3, one degree of freedom.
  const std::vector<std::uint64_t> observed{10, 20};
  const std::vector<double> p{0.5, 0.5};
  const auto result = chi_square(observed, p, 30);
  EXPECT_NEAR(result.statistic, 10.0 / 3.0, 1e-12);
  EXPECT_EQ(result.dof, 1u);
  EXPECT_NEAR(result.p_value, 0.06788915486182893, 1e-9);
}

TEST(ChiSquare, PerfectFit) {
  const std::vector<std::uint64_t> observed{25, 25, 50};
  const std::vector<double> p{0.25, 0.25, 0.5};
  const auto result = chi_square(observed, p, 100);
  EXPECT_EQ(result.statistic, 0.0);
  EXPECT_EQ(result.dof, 2u);
  EXPECT_NEAR(result.p_value, 1.0, 1e-12);
}

TEST(ChiSquare, PoolsSparseCells) {
  // Expected counts 2, 3, 45, 50: the two sparse cells pool into one of 5.
  const std::vector<std::uint64_t> observed{2, 3, 45, 50};
  const std::vector<double> p{0.02, 0.03, 0.45, 0.5};
  const auto result = chi_square(observed, p, 100);
  EXPECT_EQ(result.dof, 2u);
  EXPECT_NEAR(result.statistic, 0.0, 1e-12);
}

TEST(ChiSquare, ObservationInImpossibleCell) {
  const std::vector<std::uint64_t> observed{500, 499, 1};
  const std::vector<double> p{0.5, 0.5, 0.0};
  const auto result = chi_square(observed, p, 1000);
  EXPECT_TRUE(std::isinf(result.statistic));
  EXPECT_EQ(result.p_value, 0.0);
}

TEST(Tv, DistanceAndNoiseFloor) {
  const std::vector<std::uint64_t> observed{60, 40};
  const std::vector<double> p{0.5, 0.5};
  EXPECT_NEAR(tv_distance(observed, p, 100), 0.1, 1e-12);
  // 2 * sqrt(2 * 0.25 / (pi * 1e6)) / 2
  EXPECT_NEAR(tv_noise_floor(p, 1'000'000), 3.989422804014327e-4, 1e-12);
  const std::vector<double> certain{1.0};
  EXPECT_EQ(tv_noise_floor(certain, 100), 0.0);
}

TEST(Gof, CascadeFitsWithoutReplacementLaw) {
  GofConfig config;
  config.weights = weights({1, 2, 3});
  config.k = 2;
  config.trials = 100'000;
  config.seed = 1;
  const auto report = gof_test(config);
  EXPECT_EQ(report.cells, "ordered");
  EXPECT_TRUE(report.pass) << report.chi_square.p_value;
  EXPECT_LT(report.tv_distance, 5 * report.noise_floor);
}

TEST(Gof, SingleElementIsDegenerate) {
  GofConfig config;
  config.weights = weights({7});
  config.trials = 1000;
  const auto report = gof_test(config);
  EXPECT_EQ(report.chi_square.statistic, 0.0);
  EXPECT_TRUE(report.pass);
}

TEST(Gof, WithReplacementIsRejected) {
  GofConfig config;
  config.sampler = SamplerKind::WithReplacement;
  config.weights = weights({1, 1});
  config.k = 2;
  config.trials = 1000;
  const auto report = gof_test(config);
  EXPECT_FALSE(report.pass);
  EXPECT_EQ(report.chi_square.p_value, 0.0);
}

class GofSamplers : public ::testing::TestWithParam<SamplerKind> {};

TEST_P(GofSamplers, FitInBothModes) {
  for (auto mode : {WeightMode::ExactInteger, WeightMode::Float64}) {
    GofConfig config;
    config.sampler = GetParam();
    config.weights = weights({3, 1, 4, 1, 5});
    config.k = 3;
    config.trials = 20'000;
    config.seed = 2;
    config.mode = mode;
    const auto report = gof_test(config);
    EXPECT_TRUE(report.pass) << to_string(GetParam()) << " " << to_string(mode) << " p = "
                             << report.chi_square.p_value;
  }
}

INSTANTIATE_TEST_SUITE_P(WithoutReplacement, GofSamplers,
                         ::testing::Values(SamplerKind::Cascade, SamplerKind::Exponent,
                                           SamplerKind::Oversample),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Gof, LargeKUsesMarginalCells) {
  GofConfig config;
  config.weights = weights({1, 2, 3, 4, 5, 6, 7, 8});
  config.k = 5;
  config.trials = 20'000;
  config.seed = 3;
  const auto report = gof_test(config);
  EXPECT_EQ(report.cells, "marginal");
  ASSERT_TRUE(report.min_inclusion_p.has_value());
  EXPECT_TRUE(report.pass);
}

TEST(Gof, LargeKCatchesWithReplacement) {
  GofConfig config;
  config.sampler = SamplerKind::WithReplacement;
  config.weights = weights({1, 2, 3, 4, 5, 6, 7, 8});
  config.k = 5;
  config.trials = 5000;
  EXPECT_FALSE(gof_test(config).pass);
}

TEST(Gof, RejectsBadConfig) {
  GofConfig config;
  config.weights = weights({1, 2});
  config.trials = 999;
  EXPECT_THROW(gof_test(config), Error);
  config.trials = 1000;
  config.k = 3;
  EXPECT_THROW(gof_test(config), Error);
  config.k = 1;
  config.weights.clear();
  EXPECT_THROW(gof_test(config), Error);
}

TEST(Gof, Deterministic) {
  GofConfig config;
  config.weights = weights({2, 5, 1});
  config.k = 2;
  config.trials = 2000;
  config.seed = 99;
  EXPECT_EQ(sample_outcomes(config), sample_outcomes(config));
  config.seed = 100;
  const auto other = sample_outcomes(config);
  config.seed = 99;
  EXPECT_NE(sample_outcomes(config), other);
}

TEST(Precision, CoarseKeysAreDetected) {
  // At 4 bits a light key ties the saturated heavy key with probability
  // 1/16 and wins half of those ties.
  const auto report = precision_experiment(weights({1ul << 40, 1, 1}), 2, {4, 53}, 100'000, 4);
  ASSERT_EQ(report.exponent.size(), 2u);
  EXPECT_LT(report.cascade_tv, report.threshold);
  EXPECT_GT(report.exponent[0].tv_distance, report.threshold);
  EXPECT_LT(report.exponent[1].tv_distance, report.threshold);
}

TEST(Precision, RejectsBadBits) {
  EXPECT_THROW(precision_experiment(weights({1, 2}), 1, {0}, 1000, 0), Error);
  EXPECT_THROW(precision_experiment(weights({1, 2}), 1, {54}, 1000, 0), Error);
  EXPECT_THROW(precision_experiment(weights({1, 2, 3, 4}), 4, {8}, 1000, 0), Error);
}

TEST(SamplerKindNames, RoundTrip) {
  for (auto kind : {SamplerKind::Cascade, SamplerKind::WithReplacement, SamplerKind::Exponent,
                    SamplerKind::Oversample}) {
    EXPECT_EQ(parse_sampler_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_sampler_kind("bogus").has_value());
}

}  // namespace
}  // namespace cascade::stats
