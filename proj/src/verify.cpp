#include "cascade/oracle.hpp"

namespace cascade::oracle {

namespace {

ExactDistribution unit_law(std::span<const ExactElement> stream) {
  ExactWeight total = 0;
  for (const auto& e : stream) total += e.weight;
  ExactDistribution law;
  for (const auto& e : stream) law.add({e.id}, Rational(e.weight, total));
  return law;
}

}  // namespace

VerifyReport verify_lattice(const VerifyConfig& config) {
  if (config.max_n == 0 || config.max_k == 0 || config.max_weight == 0) {
    throw Error(ErrorCode::InvalidConfig, "lattice bounds must be positive");
  }
  if (cascade_branch_bound(config.max_n, config.max_k) > config.budget.max_branches) {
    throw Error(ErrorCode::BudgetExceeded,
                "n = " + std::to_string(config.max_n) + ", k = " + std::to_string(config.max_k) +
                    " exceeds the branch budget of " + std::to_string(config.budget.max_branches));
  }

  VerifyReport report;
  for (auto& point : make_lattice(config.max_n, config.max_weight, config.per_n, config.orders,
                                  config.seed)) {
    const std::size_t n = point.stream.size();
    for (std::size_t k = 1; k <= config.max_k; ++k) {
      VerifyRecord record;
      record.assignment = point.assignment;
      record.order = point.order;
      record.k = k;
      const auto analytic = analytic_swor(point.stream, std::min(n, k));
      const auto cascade_law = enumerate_cascade(point.stream, k, config.budget);
      record.checks.push_back({"cascade", distributions_equal(cascade_law, analytic)});

      const auto replayed = config.mutant ? replay_cascade<MutantCascade>(point.stream, k, config.budget)
                                          : replay_cascade<ExactCascade>(point.stream, k, config.budget);
      record.checks.push_back({"replay", distributions_equal(replayed, analytic)});

      if (k == 1) {
        record.checks.push_back(
            {"unit", distributions_equal(enumerate_unit(point.stream, config.budget), unit_law(point.stream))});
      }
      if (n <= config.coupled_max_n && n > k) {
        record.checks.push_back(
            {"coupled", distributions_equal(enumerate_coupled(point.stream, k, config.budget), cascade_law)});
      }
      for (std::size_t i = 1; i < std::min(n, k); ++i) {
        record.checks.push_back({"prefix-" + std::to_string(i),
                                 distributions_equal(cascade_law.marginal(i), analytic_swor(point.stream, i))});
      }
      Comparison mass;
      if (cascade_law.total_mass() != 1) {
        mass = {false, Divergence{{}, cascade_law.total_mass(), Rational(1)}};
      }
      record.checks.push_back({"mass", mass});

      for (const auto& check : record.checks) record.pass = record.pass && check.comparison.equal;
      if (!record.pass) ++report.failures;
      record.stream = point.stream;
      report.records.push_back(std::move(record));
    }
  }
  return report;
}

}  // namespace cascade::oracle
