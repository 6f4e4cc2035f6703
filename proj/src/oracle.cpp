#include "cascade/oracle.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace cascade::oracle {

void ExactDistribution::add(const Outcome& outcome, const Rational& mass) {
  if (mass == 0) return;
  auto [it, inserted] = masses_.try_emplace(outcome, mass);
  if (!inserted) it->second += mass;
}

Rational ExactDistribution::mass(const Outcome& outcome) const {
  auto it = masses_.find(outcome);
  return it == masses_.end() ? Rational(0) : it->second;
}

Rational ExactDistribution::total_mass() const {
  Rational total = 0;
  for (const auto& [outcome, mass] : masses_) total += mass;
  return total;
}

ExactDistribution ExactDistribution::marginal(std::size_t length) const {
  ExactDistribution out;
  for (const auto& [outcome, mass] : masses_) {
    const auto cut = std::min(length, outcome.size());
    out.add(Outcome(outcome.begin(), outcome.begin() + static_cast<std::ptrdiff_t>(cut)), mass);
  }
  return out;
}

std::uint64_t cascade_branch_bound(std::size_t n, std::size_t k) {
  std::uint64_t decisions = 0;
  for (std::size_t j = 1; j <= n; ++j) decisions += std::min(j, k);
  decisions -= std::min(n, k);
  return decisions >= 63 ? std::uint64_t{1} << 63 : std::uint64_t{1} << decisions;
}

namespace {

void check_budget(std::uint64_t bound, const EnumerationBudget& budget) {
  if (bound > budget.max_branches) {
    throw Error(ErrorCode::BudgetExceeded, "branch tree of " + std::to_string(bound) +
                                               " leaves exceeds the budget of " +
                                               std::to_string(budget.max_branches));
  }
}

struct Level {
  std::optional<std::size_t> held;  // index into the stream
  ExactWeight total = 0;
};

class CascadeEnumerator {
 public:
  CascadeEnumerator(std::span<const ExactElement> stream, std::size_t k) : stream_(stream), k_(k) {}

  ExactDistribution run() {
    arrive(std::vector<Level>(k_), 0, Rational(1));
    return std::move(law_);
  }

 private:
  void arrive(const std::vector<Level>& levels, std::size_t j, const Rational& p) {
    if (j == stream_.size()) {
      Outcome outcome;
      for (const auto& level : levels) {
        if (!level.held) break;
        outcome.push_back(stream_[*level.held].id);
      }
      law_.add(outcome, p);
      return;
    }
    offer(levels, j, 0, j, p);
  }

  // Offers stream element `offered` to level i while processing arrival j.
  void offer(const std::vector<Level>& levels, std::size_t j, std::size_t i,
             std::optional<std::size_t> offered, const Rational& p) {
    const std::size_t active = std::min(j + 1, k_);
    if (i == active || !offered) {
      arrive(levels, j + 1, p);
      return;
    }
    const ExactWeight& weight = stream_[*offered].weight;
    const ExactWeight total = levels[i].total + weight;
    const Rational accept(weight, total);

    auto next = levels;
    next[i].total = total;
    next[i].held = offered;
    offer(next, j, i + 1, levels[i].held, p * accept);

    if (weight < total) {
      next[i].held = levels[i].held;
      offer(next, j, i + 1, offered, p * (1 - accept));
    }
  }

  std::span<const ExactElement> stream_;
  std::size_t k_;
  ExactDistribution law_;
};

}  // namespace

ExactDistribution enumerate_cascade(std::span<const ExactElement> stream, std::size_t k,
                                    EnumerationBudget budget) {
  if (k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
  check_budget(cascade_branch_bound(stream.size(), k), budget);
  return CascadeEnumerator(stream, k).run();
}

ExactDistribution enumerate_unit(std::span<const ExactElement> stream, EnumerationBudget budget) {
  check_budget(cascade_branch_bound(stream.size(), 1), budget);
  ExactDistribution law;
  std::function<void(std::size_t, std::optional<ElementId>, const ExactWeight&, const Rational&)>
      step = [&](std::size_t j, std::optional<ElementId> held, const ExactWeight& total,
                 const Rational& p) {
        if (j == stream.size()) {
          law.add(held ? Outcome{*held} : Outcome{}, p);
          return;
        }
        const ExactWeight next_total = total + stream[j].weight;
        const Rational accept(stream[j].weight, next_total);
        step(j + 1, stream[j].id, next_total, p * accept);
        if (stream[j].weight < next_total) step(j + 1, held, next_total, p * (1 - accept));
      };
  step(0, std::nullopt, ExactWeight(0), Rational(1));
  return law;
}

ExactDistribution analytic_swor(std::span<const ExactElement> elements, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
  if (elements.size() < k) {
    throw Error(ErrorCode::TooFewElements, "a k-sample without replacement needs |S| >= k");
  }
  ExactWeight total = 0;
  for (const auto& e : elements) total += e.weight;

  ExactDistribution law;
  std::vector<bool> used(elements.size(), false);
  Outcome prefix;
  std::function<void(const ExactWeight&, const Rational&)> pick = [&](const ExactWeight& remaining,
                                                                      const Rational& p) {
    if (prefix.size() == k) {
      law.add(prefix, p);
      return;
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      prefix.push_back(elements[i].id);
      pick(remaining - elements[i].weight, p * Rational(elements[i].weight, remaining));
      prefix.pop_back();
      used[i] = false;
    }
  };
  pick(total, Rational(1));
  return law;
}

std::vector<Rational> inclusion_probabilities(std::span<const ExactElement> elements,
                                              std::size_t k) {
  const std::size_t n = elements.size();
  if (n > 16) throw Error(ErrorCode::InvalidConfig, "inclusion probabilities limited to n <= 16");
  if (k == 0) throw Error(ErrorCode::InvalidK, "k must be at least 1");
  if (n < k) throw Error(ErrorCode::TooFewElements, "a k-sample without replacement needs |S| >= k");

  ExactWeight total = 0;
  for (const auto& e : elements) total += e.weight;
  const std::size_t subsets = std::size_t{1} << n;
  // Probability that the first popcount(mask) picks are exactly `mask`.
  std::vector<Rational> chosen(subsets, Rational(0));
  std::vector<ExactWeight> mask_weight(subsets, ExactWeight(0));
  chosen[0] = 1;
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    mask_weight[mask] = mask_weight[mask & (mask - 1)] + elements[low].weight;
  }
  std::vector<Rational> inclusion(n, Rational(0));
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    if (chosen[mask] == 0) continue;
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size == k) {
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1U) inclusion[i] += chosen[mask];
      }
      continue;
    }
    const ExactWeight remaining = total - mask_weight[mask];
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) continue;
      chosen[mask | (std::size_t{1} << i)] += chosen[mask] * Rational(elements[i].weight, remaining);
    }
  }
  return inclusion;
}

ExactDistribution couple(const ExactDistribution& x_law, std::span<const ExactElement> base,
                         const ExactElement& extra) {
  std::unordered_map<std::uint64_t, ExactWeight> weight_of;
  ExactWeight total = extra.weight;
  for (const auto& e : base) {
    weight_of.emplace(to_index(e.id), e.weight);
    total += e.weight;
  }
  weight_of.emplace(to_index(extra.id), extra.weight);

  ExactDistribution y_law;
  for (const auto& [x, px] : x_law.masses()) {
    const std::size_t k = x.size();
    Outcome y;
    std::function<void(const ExactWeight&, const Rational&)> extend = [&](const ExactWeight& unused,
                                                                          const Rational& p) {
      const std::size_t i = y.size();
      if (i == k) {
        y_law.add(y, p);
        return;
      }
      ElementId candidate = extra.id;
      if (i > 0) {
        // L_i = {X_1..X_i, extra} \ {Y_1..Y_i}
        Outcome left(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(i));
        left.push_back(extra.id);
        std::erase_if(left, [&](ElementId id) { return std::find(y.begin(), y.end(), id) != y.end(); });
        if (left.size() != 1) throw std::logic_error("coupling invariant |L_i| = 1 violated");
        candidate = left.front();
      }
      const ExactWeight& w = weight_of.at(to_index(candidate));
      const Rational take(w, unused);
      y.push_back(candidate);
      extend(unused - w, p * take);
      y.pop_back();
      if (take != 1) {
        y.push_back(x[i]);
        extend(unused - weight_of.at(to_index(x[i])), p * (1 - take));
        y.pop_back();
      }
    };
    extend(total, px);
  }
  return y_law;
}

ExactDistribution enumerate_coupled(std::span<const ExactElement> stream, std::size_t k,
                                    EnumerationBudget budget) {
  if (stream.empty() || stream.size() - 1 < k) {
    throw Error(ErrorCode::InvalidConfig, "coupled mode needs at least k + 1 elements");
  }
  const auto base = stream.first(stream.size() - 1);
  return couple(enumerate_cascade(base, k, budget), base, stream.back());
}

Comparison distributions_equal(const ExactDistribution& lhs, const ExactDistribution& rhs) {
  auto l = lhs.masses().begin();
  auto r = rhs.masses().begin();
  const auto l_end = lhs.masses().end();
  const auto r_end = rhs.masses().end();
  while (l != l_end || r != r_end) {
    if (r == r_end || (l != l_end && l->first < r->first)) {
      return {false, Divergence{l->first, l->second, Rational(0)}};
    }
    if (l == l_end || r->first < l->first) {
      return {false, Divergence{r->first, Rational(0), r->second}};
    }
    if (l->second != r->second) return {false, Divergence{l->first, l->second, r->second}};
    ++l;
    ++r;
  }
  return {};
}

std::string format_outcome(const Outcome& outcome) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (i) out << ',';
    out << to_index(outcome[i]);
  }
  out << ')';
  return out.str();
}

bool BranchScript::accept(const ExactWeight& weight, const ExactWeight& total) {
  if (weight >= total) return true;
  if (cursor_ == path_.size()) path_.push_back({true});
  const bool accepted = path_[cursor_++].accepted;
  const Rational p(weight, total);
  probability_ *= accepted ? p : Rational(1 - p);
  return accepted;
}

bool BranchScript::advance() {
  while (!path_.empty() && !path_.back().accepted) path_.pop_back();
  cursor_ = 0;
  probability_ = 1;
  if (path_.empty()) return false;
  path_.back().accepted = false;
  return true;
}

std::vector<LatticePoint> make_lattice(std::size_t max_n, std::uint64_t max_weight,
                                       std::size_t per_n, std::size_t orders, std::uint64_t seed) {
  std::vector<LatticePoint> lattice;
  std::size_t assignment = 0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t a = 0; a < per_n; ++a, ++assignment) {
      RandomSource rng(derive_seed(seed, assignment));
      std::vector<ExactElement> base;
      for (std::size_t i = 0; i < n; ++i) {
        base.push_back({ElementId{i}, ExactWeight(1 + rng.uniform_below(max_weight))});
      }
      for (std::size_t order = 0; order < orders; ++order) {
        auto stream = base;
        if (order == 1) {
          std::reverse(stream.begin(), stream.end());
        } else if (order > 1) {
          for (std::size_t i = stream.size(); i > 1; --i) {
            std::swap(stream[i - 1], stream[rng.uniform_below(i)]);
          }
        }
        lattice.push_back({assignment, order, std::move(stream)});
      }
    }
  }
  return lattice;
}

}  // namespace cascade::oracle
