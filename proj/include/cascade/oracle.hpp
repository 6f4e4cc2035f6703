#pragma once

// Exact verification engine. Every accept/reject decision of the unit and
// cascade samplers is expanded into a branch tree with rational
// probabilities, and the resulting law over ordered outputs is compared
// with the analytic law of weighted sampling without replacement.
//
// Two independent routes produce cascade laws:
//   * enumerate_cascade re-derives the transition rule on plain level
//     states, sharing no code with CascadeSampler;
//   * replay_cascade drives the production CascadeSampler through a
//     BranchScript decision source that walks every path.
// A disagreement between either route and analytic_swor is a failure.

#include "cascade/cascade.hpp"
#include "cascade/core.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cascade::oracle {

using Rational = BigRational;
using Outcome = std::vector<ElementId>;

/// Law over ordered tuples of element ids with exact rational masses.
class ExactDistribution {
 public:
  void add(const Outcome& outcome, const Rational& mass);

  /// Zero for tuples outside the support.
  Rational mass(const Outcome& outcome) const;
  Rational total_mass() const;

  /// Law of the first `length` coordinates.
  ExactDistribution marginal(std::size_t length) const;

  const std::map<Outcome, Rational>& masses() const noexcept { return masses_; }
  std::size_t size() const noexcept { return masses_.size(); }

 private:
  std::map<Outcome, Rational> masses_;
};

struct EnumerationBudget {
  /// Cap on branch-tree leaves (2^18 covers n = 6, k = 3).
  std::uint64_t max_branches = std::uint64_t{1} << 18;
};

/// Worst-case branch count of a cascade over n elements with k levels:
/// one binary decision per non-forced level feed. Saturates at 2^63.
std::uint64_t cascade_branch_bound(std::size_t n, std::size_t k);

/// Exact law of (Y_1..Y_min(n,k)) under cascade sampling of `stream` in
/// arrival order. Throws BudgetExceeded.
ExactDistribution enumerate_cascade(std::span<const ExactElement> stream, std::size_t k,
                                    EnumerationBudget budget = {});

/// Exact law of the unit sampler's held element after `stream`.
ExactDistribution enumerate_unit(std::span<const ExactElement> stream,
                                 EnumerationBudget budget = {});

/// P(a_1..a_k) = prod_i w(a_i) / (W - sum_{m<i} w(a_m)). Throws TooFewElements.
ExactDistribution analytic_swor(std::span<const ExactElement> elements, std::size_t k);

/// Each element's probability of appearing anywhere in a k-sample without
/// replacement, by summation over subsets. Throws InvalidConfig for n > 16.
std::vector<Rational> inclusion_probabilities(std::span<const ExactElement> elements, std::size_t k);

/// Builds the law of Y from the law of a without-replacement sample X over
/// S = `base` and one extra element `extra`:
///   Y_1 = extra with prob w(extra)/w(T), else X_1;
///   Z_i = the single element of {X_1..X_i, extra} \ {Y_1..Y_i};
///   Y_{i+1} = Z_i with prob w(Z_i)/w(T \ {Y_1..Y_i}), else X_{i+1}.
/// Throws std::logic_error if some {X_1..X_i, extra} \ {Y_1..Y_i} is not a
/// singleton.
ExactDistribution couple(const ExactDistribution& x_law, std::span<const ExactElement> base,
                         const ExactElement& extra);

/// Coupled-mode law for a stream: X is the enumerated cascade law of all but
/// the last element, coupled with the last element. Requires n - 1 >= k.
ExactDistribution enumerate_coupled(std::span<const ExactElement> stream, std::size_t k,
                                    EnumerationBudget budget = {});

struct Divergence {
  Outcome outcome;
  Rational lhs;
  Rational rhs;
};

struct Comparison {
  bool equal = true;
  std::optional<Divergence> first_divergence;
};

/// Exact comparison over the union of supports; reports the first differing
/// tuple in lexicographic order.
Comparison distributions_equal(const ExactDistribution& lhs, const ExactDistribution& rhs);

std::string format_outcome(const Outcome& outcome);

/// Decision source that walks every path of a branch tree in depth-first
/// order. Each accept(w, W) with w < W is a binary decision of probability
/// w/W; w >= W is forced and consumes no decision.
class BranchScript {
 public:
  bool accept(const ExactWeight& weight, const ExactWeight& total);

  /// Probability of the path taken since the last rewind.
  const Rational& path_probability() const noexcept { return probability_; }

  /// Moves to the next unexplored path; false once every path was taken.
  bool advance();

 private:
  struct Decision {
    bool accepted;
  };
  std::vector<Decision> path_;
  std::size_t cursor_ = 0;
  Rational probability_ = 1;
};

/// Law of the production sampler `Cascade` over `stream`, obtained by
/// running it once per branch path under a BranchScript.
template <class Cascade = ExactCascade>
ExactDistribution replay_cascade(std::span<const ExactElement> stream, std::size_t k,
                                 EnumerationBudget budget = {}) {
  ExactDistribution law;
  BranchScript script;
  std::uint64_t leaves = 0;
  do {
    if (++leaves > budget.max_branches) {
      throw Error(ErrorCode::BudgetExceeded, "branch budget exceeded while replaying sampler");
    }
    Cascade sampler(k, 0);
    for (const auto& element : stream) sampler.feed(element, script);
    Outcome outcome;
    for (const auto& element : sampler.sample()) outcome.push_back(element.id);
    law.add(outcome, script.path_probability());
  } while (script.advance());
  return law;
}

/// Deliberately wrong unit sampler (accepts with probability w / W_before
/// instead of w / W_after). Used as a mutation target by `verify`.
class StaleTotalUnitSampler {
 public:
  using weight_type = ExactWeight;
  using element_type = ExactElement;

  template <DecisionSource<ExactWeight> Source>
  bool feed(const element_type& element, Source& source) {
    const ExactWeight before = total_;
    total_ += element.weight;
    const bool accepted = before == 0 || element.weight >= before || source.accept(element.weight, before);
    if (accepted) reservoir_ = element;
    return accepted;
  }

  const std::optional<element_type>& current() const noexcept { return reservoir_; }
  const ExactWeight& weight_total() const noexcept { return total_; }
  std::size_t state_bytes() const noexcept { return sizeof(*this); }

 private:
  std::optional<element_type> reservoir_;
  ExactWeight total_{};
};

using MutantCascade = CascadeSampler<StaleTotalUnitSampler>;

/// Pseudo-random lattice of streams for exhaustive checks: for every
/// n in [1, max_n], `per_n` weight assignments with weights in
/// [1, max_weight], each in `orders` arrival orders: identity, reversed,
/// then seeded shuffles.
struct LatticePoint {
  std::size_t assignment = 0;
  std::size_t order = 0;
  std::vector<ExactElement> stream;
};

std::vector<LatticePoint> make_lattice(std::size_t max_n, std::uint64_t max_weight,
                                       std::size_t per_n, std::size_t orders, std::uint64_t seed);

struct VerifyConfig {
  std::size_t max_n = 6;
  std::size_t max_k = 3;
  std::uint64_t max_weight = 5;
  std::size_t per_n = 40;
  std::size_t orders = 2;
  std::uint64_t seed = 0x5eed;
  /// Coupled-mode checks run for n up to this bound.
  std::size_t coupled_max_n = 5;
  EnumerationBudget budget;
  /// Replays MutantCascade instead of the production sampler.
  bool mutant = false;
};

struct CheckResult {
  /// "cascade", "replay", "unit", "coupled", "prefix-<i>" or "mass".
  std::string name;
  Comparison comparison;
};

struct VerifyRecord {
  std::size_t assignment = 0;
  std::size_t order = 0;
  std::size_t k = 0;
  std::vector<ExactElement> stream;
  std::vector<CheckResult> checks;
  bool pass = true;
};

struct VerifyReport {
  std::vector<VerifyRecord> records;
  std::size_t failures = 0;
};

/// Checks, for every lattice stream and every k in [1, max_k]:
///   cascade  - enumerate_cascade equals analytic_swor(min(n, k));
///   replay   - the production sampler's replayed law equals the same;
///   unit     - (k = 1) enumerate_unit equals w(a)/W for every a;
///   coupled  - (n <= coupled_max_n, n > k) coupled mode equals
///              enumerate_cascade;
///   prefix-i - the first i coordinates follow analytic_swor(i);
///   mass     - the cascade law sums to exactly 1.
/// Throws BudgetExceeded before doing any work if the largest lattice
/// point does not fit the budget.
VerifyReport verify_lattice(const VerifyConfig& config);

}  // namespace cascade::oracle
