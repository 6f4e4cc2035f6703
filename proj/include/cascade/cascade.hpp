#pragma once

// Cascade sampling: weighted k-sampling without replacement over a stream,
// built from k chained unit samplers and nothing but their feed/accept
// signal.
//
// Level i is fed the stream minus whatever levels 1..i-1 currently hold.
// An arriving element is offered to level 1; whenever a level accepts the
// offered element, the element it held before is offered to the next level
// instead. Elements displaced from the last level are dropped.

#include "cascade/core.hpp"
#include "cascade/random.hpp"
#include "cascade/unit.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace cascade {

template <UnitSamplerLike Unit = UnitSampler<ExactWeight>>
class CascadeSampler {
 public:
  using unit_type = Unit;
  using weight_type = typename Unit::weight_type;
  using element_type = typename Unit::element_type;

  /// k independent levels; level i draws from derive_seed(seed, i).
  CascadeSampler(std::size_t k, std::uint64_t seed) : seed_(seed), levels_(k) {
    if (k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
    sources_.reserve(k);
    for (std::size_t i = 0; i < k; ++i) sources_.emplace_back(derive_seed(seed, i));
  }

  /// Feeds one element using each level's own randomness source.
  void feed(const element_type& element) {
    feed_impl(element, [this](std::size_t level) -> RandomSource& { return sources_[level]; });
  }

  /// Feeds one element routing every level's decision through `source`.
  template <DecisionSource<weight_type> Source>
  void feed(const element_type& element, Source& source) {
    feed_impl(element, [&source](std::size_t) -> Source& { return source; });
  }

  /// Ordered outputs Y_1..Y_min(j,k).
  std::vector<element_type> sample() const {
    std::vector<element_type> out;
    out.reserve(levels_.size());
    for (const auto& level : levels_) {
      if (!level.current()) break;
      out.push_back(*level.current());
    }
    return out;
  }

  std::size_t k() const noexcept { return levels_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t elements_seen() const noexcept { return seen_; }

  std::span<const Unit> levels() const noexcept { return levels_; }
  /// Mutable access for invariant-violation tests only.
  std::span<Unit> levels_for_testing() noexcept { return levels_; }

  /// Checks weight_total(level i) == arrived_total - sum of held weights on
  /// levels above i, for every occupied level. Integer weights compare
  /// exactly; float weights within a relative 1e-9 of arrived_total.
  bool ledger_check(const weight_type& arrived_total) const {
    weight_type upstream{};
    for (const auto& level : levels_) {
      if (!level.current()) break;
      if (!ledger_equal(level.weight_total(), arrived_total - upstream, arrived_total)) return false;
      upstream += level.current()->weight;
    }
    for (const auto& level : levels_) {
      if (!level.current() && level.weight_total() != weight_type{}) return false;
    }
    return true;
  }

  std::size_t state_bytes() const noexcept {
    std::size_t bytes = sizeof(*this);
    for (const auto& level : levels_) bytes += level.state_bytes();
    return bytes + sources_.size() * sizeof(RandomSource);
  }

 private:
  template <class SourceFor>
  void feed_impl(const element_type& element, SourceFor&& source_for) {
    for (const auto& level : levels_) {
      if (level.current() && level.current()->id == element.id) {
        throw Error(ErrorCode::DuplicateId, "element id is already held by the sample");
      }
    }
    ++seen_;
    const std::size_t active = static_cast<std::size_t>(std::min<std::uint64_t>(seen_, k()));
    std::optional<element_type> offered = element;
    for (std::size_t i = 0; i < active && offered; ++i) {
      // Empty only when i + 1 == seen_, where the level must accept.
      std::optional<element_type> previous = levels_[i].current();
      if (levels_[i].feed(*offered, source_for(i))) offered = std::move(previous);
    }
  }

  static bool ledger_equal(const weight_type& actual, const weight_type& expected,
                           const weight_type& scale) {
    if constexpr (std::same_as<weight_type, FloatWeight>) {
      return std::abs(actual - expected) <= 1e-9 * scale;
    } else {
      return actual == expected;
    }
  }

  std::uint64_t seed_;
  std::uint64_t seen_ = 0;
  std::vector<Unit> levels_;
  std::vector<RandomSource> sources_;
};

using ExactCascade = CascadeSampler<UnitSampler<ExactWeight>>;
using FloatCascade = CascadeSampler<UnitSampler<FloatWeight>>;

}  // namespace cascade
