#pragma once

// Reference samplers compared against cascade sampling: independent
// k-sampling with replacement, over-sampling until k distinct draws, and
// the random-key ("exponent") method with configurable key precision.

#include "cascade/core.hpp"
#include "cascade/random.hpp"
#include "cascade/unit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace cascade {

/// k independent unit samplers, each fed every element.
template <SamplerWeight W>
class WithReplacementSampler {
 public:
  using element_type = WeightedElement<W>;

  WithReplacementSampler(std::size_t k, std::uint64_t seed) : seed_(seed), units_(k) {
    if (k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
    sources_.reserve(k);
    for (std::size_t i = 0; i < k; ++i) sources_.emplace_back(derive_seed(seed, i));
  }

  void feed(const element_type& element) {
    for (std::size_t i = 0; i < units_.size(); ++i) units_[i].feed(element, sources_[i]);
  }

  /// One draw per slot; repetitions are expected. Empty before any feed.
  std::vector<element_type> sample() const {
    std::vector<element_type> out;
    for (const auto& unit : units_) {
      if (unit.current()) out.push_back(*unit.current());
    }
    return out;
  }

  std::size_t k() const noexcept { return units_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::vector<UnitSampler<W>> units_;
  std::vector<RandomSource> sources_;
};

inline constexpr int kFullKeyPrecision = 53;

/// Chops a positive double to `bits` significand bits (round toward zero).
inline double truncate_mantissa(double value, int bits) {
  if (bits >= kFullKeyPrecision || value == 0.0 || !std::isfinite(value)) return value;
  int exponent = 0;
  const double fraction = std::frexp(value, &exponent);
  return std::ldexp(std::floor(std::ldexp(fraction, bits)), exponent - bits);
}

/// Random-key sampler: element p gets key r^(1/w(p)) with r ~ U(0,1); the
/// sample is the k largest keys in descending order.
///
/// At full precision keys are compared as log(r)/w, which preserves order
/// without underflow. With fewer mantissa bits the key r^(1/w) is computed
/// in double and its significand chopped, so heavy elements saturate and
/// distinct keys collide. Equal keys are ordered by an independent uniform
/// tiebreak, so the law does not depend on arrival order.
template <SamplerWeight W>
class ExponentSampler {
 public:
  using element_type = WeightedElement<W>;

  struct Entry {
    double key;
    std::uint64_t tiebreak;
    std::uint64_t arrival;
    element_type element;
  };

  ExponentSampler(std::size_t k, std::uint64_t seed, int mantissa_bits = kFullKeyPrecision)
      : k_(k), bits_(mantissa_bits), rng_(seed) {
    if (k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
    if (mantissa_bits < 1) throw Error(ErrorCode::InvalidConfig, "mantissa bits must be positive");
    heap_.reserve(k);
  }

  void feed(const element_type& element) {
    const double r = rng_.uniform_open01();
    const double weight = to_double(element.weight);
    const double key = bits_ >= kFullKeyPrecision
                           ? std::log(r) / weight
                           : truncate_mantissa(std::pow(r, 1.0 / weight), bits_);
    Entry entry{key, rng_.next_u64(), arrivals_++, element};
    if (heap_.size() < k_) {
      heap_.push_back(std::move(entry));
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    } else if (ranks_before(entry, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), ranks_before);
      heap_.back() = std::move(entry);
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    }
  }

  /// Held entries, best key first.
  std::vector<Entry> entries() const {
    auto sorted = heap_;
    std::sort(sorted.begin(), sorted.end(), ranks_before);
    return sorted;
  }

  std::vector<element_type> sample() const {
    std::vector<element_type> out;
    for (auto& entry : entries()) out.push_back(std::move(entry.element));
    return out;
  }

  std::size_t k() const noexcept { return k_; }
  int mantissa_bits() const noexcept { return bits_; }

 private:
  // Heap order puts the worst-ranked entry at the front.
  static bool ranks_before(const Entry& a, const Entry& b) {
    if (a.key != b.key) return a.key > b.key;
    if (a.tiebreak != b.tiebreak) return a.tiebreak > b.tiebreak;
    return a.arrival < b.arrival;
  }

  std::size_t k_;
  int bits_;
  RandomSource rng_;
  std::uint64_t arrivals_ = 0;
  std::vector<Entry> heap_;
};

template <SamplerWeight W>
struct OversampleResult {
  std::vector<WeightedElement<W>> sample;
  std::uint64_t draw_count = 0;
  /// Draw budget ran out before k distinct elements appeared.
  bool capped = false;
};

/// Non-streaming over-sampling: independent unit draws from the whole set
/// until k distinct elements have appeared, kept in first-appearance order.
template <SamplerWeight W>
OversampleResult<W> oversample(std::span<const WeightedElement<W>> elements, std::size_t k,
                               RandomSource& rng,
                               std::uint64_t draw_cap = std::numeric_limits<std::uint64_t>::max()) {
  if (k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
  if (elements.size() < k) {
    throw Error(ErrorCode::TooFewElements, "over-sampling needs at least k distinct elements");
  }
  std::vector<W> prefix;
  prefix.reserve(elements.size());
  W running{};
  for (const auto& e : elements) {
    running += e.weight;
    prefix.push_back(running);
  }

  OversampleResult<W> result;
  std::vector<bool> taken(elements.size(), false);
  while (result.sample.size() < k) {
    if (result.draw_count == draw_cap) {
      result.capped = true;
      break;
    }
    ++result.draw_count;
    // Inverse CDF: first prefix sum strictly above u.
    std::size_t index = 0;
    if constexpr (std::same_as<W, ExactWeight>) {
      const ExactWeight u = rng.uniform_below(running);
      index = std::upper_bound(prefix.begin(), prefix.end(), u) - prefix.begin();
    } else {
      const double u = rng.uniform01() * running;
      index = std::upper_bound(prefix.begin(), prefix.end(), u) - prefix.begin();
      index = std::min(index, elements.size() - 1);
    }
    if (!taken[index]) {
      taken[index] = true;
      result.sample.push_back(elements[index]);
    }
  }
  return result;
}

}  // namespace cascade
