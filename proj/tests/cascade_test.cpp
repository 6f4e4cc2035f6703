#include "cascade/cascade.hpp"
#include "cascade/oracle.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

namespace cascade {
namespace {

using oracle::Rational;
using testing::ids;
using testing::stream_of;

// Conforming unit sampler that logs every element it is offered.
struct FeedLog {
  // (level, id, arrival index)
  std::vector<std::tuple<std::size_t, ElementId, std::uint64_t>> feeds;
  std::uint64_t arrival = 0;
};

class RecordingUnitSampler {
 public:
  using weight_type = ExactWeight;
  using element_type = ExactElement;

  static inline FeedLog* log = nullptr;
  static inline std::size_t next_level = 0;

  RecordingUnitSampler() : level_(next_level++) {}

  template <DecisionSource<ExactWeight> Source>
  bool feed(const element_type& element, Source& source) {
    log->feeds.emplace_back(level_, element.id, log->arrival);
    return inner_.feed(element, source);
  }
  const std::optional<element_type>& current() const noexcept { return inner_.current(); }
  const ExactWeight& weight_total() const noexcept { return inner_.weight_total(); }
  std::size_t state_bytes() const noexcept { return inner_.state_bytes(); }

 private:
  std::size_t level_;
  UnitSampler<ExactWeight> inner_;
};

TEST(Cascade, RejectsZeroK) {
  EXPECT_THROW(ExactCascade(0, 1), Error);
  try {
    ExactCascade(0, 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidK);
  }
}

TEST(Cascade, FreshStateHasEmptyLevels) {
  ExactCascade sampler(3, 99);
  EXPECT_EQ(sampler.k(), 3u);
  EXPECT_EQ(sampler.elements_seen(), 0u);
  EXPECT_TRUE(sampler.sample().empty());
  for (const auto& level : sampler.levels()) {
    EXPECT_FALSE(level.current());
    EXPECT_EQ(level.weight_total(), 0);
  }
  EXPECT_TRUE(sampler.ledger_check(0));
}

TEST(Cascade, FirstElementSettlesOnLevelOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ExactCascade sampler(2, seed);
    sampler.feed({ElementId{0}, 4});
    ASSERT_TRUE(sampler.levels()[0].current());
    EXPECT_EQ(sampler.levels()[0].current()->id, ElementId{0});
    EXPECT_FALSE(sampler.levels()[1].current());
    EXPECT_EQ(sampler.levels()[1].weight_total(), 0);
  }
}

TEST(Cascade, KOneMatchesUnitSamplerLaw) {
  const auto stream = stream_of({3, 1, 4, 1, 5});
  const auto cascade_law = oracle::replay_cascade(stream, 1);
  const auto unit_law = oracle::enumerate_unit(stream);
  EXPECT_TRUE(oracle::distributions_equal(cascade_law, unit_law).equal);
}

TEST(Cascade, TwoEqualWeightsAreSymmetric) {
  const auto law = oracle::replay_cascade(stream_of({1, 1}), 2);
  EXPECT_EQ(law.mass(ids({0, 1})), Rational(1, 2));
  EXPECT_EQ(law.mass(ids({1, 0})), Rational(1, 2));
  EXPECT_EQ(law.size(), 2u);
}

TEST(Cascade, SixOrderedPairsFollowProductFormula) {
  // a:1, b:2, c:3, k = 2; masses from prod w(a_i) / (W - sum_{m<i} w(a_m)).
  const auto law = oracle::replay_cascade(stream_of({1, 2, 3}), 2);
  EXPECT_EQ(law.mass(ids({2, 1})), Rational(1, 3));
  EXPECT_EQ(law.mass(ids({1, 2})), Rational(1, 4));
  EXPECT_EQ(law.mass(ids({2, 0})), Rational(1, 6));
  EXPECT_EQ(law.mass(ids({1, 0})), Rational(1, 12));
  EXPECT_EQ(law.mass(ids({0, 2})), Rational(1, 10));
  EXPECT_EQ(law.mass(ids({0, 1})), Rational(1, 15));
  EXPECT_EQ(law.marginal(1).mass(ids({2})), Rational(1, 2));
}

TEST(Cascade, ExhaustsSetWhenKEqualsN) {
  RandomSource rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto stream = testing::random_stream(rng, 8, 20);
    ExactCascade sampler(stream.size(), rng.next_u64());
    for (const auto& e : stream) sampler.feed(e);
    std::set<ElementId> held;
    for (const auto& e : sampler.sample()) held.insert(e.id);
    EXPECT_EQ(held.size(), stream.size());
  }
}

TEST(Cascade, SampleLengthIsMinOfSeenAndK) {
  ExactCascade sampler(4, 5);
  for (std::uint64_t j = 0; j < 10; ++j) {
    sampler.feed({ElementId{j}, 1 + j});
    EXPECT_EQ(sampler.sample().size(), std::min<std::uint64_t>(j + 1, 4));
    EXPECT_EQ(sampler.elements_seen(), j + 1);
  }
}

TEST(Cascade, SameSeedSameSample) {
  auto run = [](std::uint64_t seed) {
    ExactCascade sampler(5, seed);
    for (std::uint64_t j = 0; j < 500; ++j) sampler.feed({ElementId{j}, 1 + (j * 7919) % 97});
    return sampler.sample();
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));
}

TEST(Cascade, RejectsElementAlreadyHeld) {
  ExactCascade sampler(2, 0);
  sampler.feed({ElementId{0}, 1});
  EXPECT_THROW(sampler.feed({ElementId{0}, 1}), Error);
  EXPECT_EQ(sampler.elements_seen(), 1u);
}

TEST(Cascade, LedgerDetectsCorruptedLevel) {
  ExactCascade sampler(3, 8);
  ExactWeight arrived = 0;
  for (std::uint64_t j = 0; j < 10; ++j) {
    sampler.feed({ElementId{j}, j + 1});
    arrived += j + 1;
  }
  ASSERT_TRUE(sampler.ledger_check(arrived));
  auto& level = sampler.levels_for_testing()[1];
  level = UnitSampler<ExactWeight>(level.current(), level.weight_total() + 1);
  EXPECT_FALSE(sampler.ledger_check(arrived));
}

// Ledger and distinctness after every feed, over random integer streams.
TEST(Cascade, LedgerAndDistinctnessHoldOnRandomStreams) {
  RandomSource rng(4242);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng.uniform_below(std::uint64_t{8});
    const auto stream = testing::random_stream(rng, 100, 1'000'000);
    ExactCascade sampler(k, rng.next_u64());
    ExactWeight arrived = 0;
    for (const auto& e : stream) {
      sampler.feed(e);
      arrived += e.weight;
      ASSERT_TRUE(sampler.ledger_check(arrived));
      std::set<ElementId> held;
      for (const auto& y : sampler.sample()) held.insert(y.id);
      ASSERT_EQ(held.size(), sampler.sample().size());
    }
  }
}

TEST(Cascade, FloatLedgerHolds) {
  FloatCascade sampler(4, 12);
  double arrived = 0;
  for (std::uint64_t j = 0; j < 1000; ++j) {
    const double w = 0.1 * static_cast<double>(1 + j % 13);
    sampler.feed({ElementId{j}, w});
    arrived += w;
  }
  EXPECT_TRUE(sampler.ledger_check(arrived));
}

// Each element reaches a level at most once, reaches level i + 1 only in the
// arrival in which level i displaced it, and one arrival costs at most
// min(j, k) unit feeds.
TEST(Cascade, ElementsFlowDownOneLevelAtATime) {
  RandomSource rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    FeedLog log;
    RecordingUnitSampler::log = &log;
    RecordingUnitSampler::next_level = 0;
    const std::size_t k = 1 + rng.uniform_below(std::uint64_t{5});
    CascadeSampler<RecordingUnitSampler> sampler(k, rng.next_u64());
    const auto stream = testing::random_stream(rng, 30, 10);

    std::vector<std::optional<ElementId>> held(k);
    for (std::uint64_t j = 0; j < stream.size(); ++j) {
      log.arrival = j;
      const auto before = log.feeds.size();
      std::vector<std::optional<ElementId>> previous(k);
      for (std::size_t i = 0; i < k; ++i) {
        if (sampler.levels()[i].current()) previous[i] = sampler.levels()[i].current()->id;
      }
      sampler.feed(stream[j]);
      const auto fed = log.feeds.size() - before;
      EXPECT_LE(fed, std::min<std::size_t>(j + 1, k));

      // Walk this arrival's feeds: level i + 1 is offered either the element
      // offered to level i (rejected) or the one level i held (displaced).
      ElementId offered = stream[j].id;
      for (std::size_t f = before; f < log.feeds.size(); ++f) {
        const auto [level, id, arrival] = log.feeds[f];
        EXPECT_EQ(level, f - before);
        EXPECT_EQ(id, offered);
        const auto now = sampler.levels()[level].current();
        if (now && now->id == id && previous[level] != id) {
          if (!previous[level]) break;
          offered = *previous[level];
        }
      }
    }
    std::map<std::pair<std::size_t, ElementId>, int> per_level;
    for (const auto& [level, id, arrival] : log.feeds) {
      EXPECT_EQ(++per_level[std::make_pair(level, id)], 1);
    }
  }
  RecordingUnitSampler::log = nullptr;
}

TEST(Cascade, StateSizeIsLinearInK) {
  const auto bytes = [](std::size_t k) {
    ExactCascade sampler(k, 0);
    for (std::uint64_t j = 0; j < 100; ++j) sampler.feed({ElementId{j}, 1 + j});
    return sampler.state_bytes();
  };
  const double one = static_cast<double>(bytes(1));
  for (std::size_t k : {2, 4, 8, 16}) {
    const double ratio = static_cast<double>(bytes(k)) / one;
    EXPECT_GE(ratio, static_cast<double>(k) / 2);
    EXPECT_LE(ratio, static_cast<double>(k) * 2);
  }
}

}  // namespace
}  // namespace cascade
