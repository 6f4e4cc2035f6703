#include "cascade/cli.hpp"

#include "cascade/baselines.hpp"
#include "cascade/bench.hpp"
#include "cascade/cascade.hpp"
#include "cascade/oracle.hpp"
#include "cascade/stats.hpp"
#include "cascade/stream_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace cascade::cli {

namespace {

using nlohmann::json;

json weight_json(const ExactWeight& w) {
  if (w <= std::numeric_limits<std::uint64_t>::max()) return w.convert_to<std::uint64_t>();
  return w.str();
}
json weight_json(FloatWeight w) { return w; }

json rational_json(const oracle::Rational& r) { return r.str(); }

std::vector<std::size_t> parse_size_list(std::string_view text) {
  std::vector<std::size_t> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::InvalidConfig, "malformed list item '" + std::string(item) + "'");
    }
    values.push_back(value);
    start = end + 1;
  }
  return values;
}

/// Seed from the flag, else CASCADE_SEED, else system entropy.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CASCADE_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t value = 0;
    const std::string_view text(env);
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
      throw Error(ErrorCode::InvalidConfig, "CASCADE_SEED must be an unsigned 64-bit integer");
    }
    return value;
  }
  std::random_device entropy;
  return (static_cast<std::uint64_t>(entropy()) << 32) ^ entropy();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight:
    case ErrorCode::NonIntegerWeight:
    case ErrorCode::MalformedWeight:
    case ErrorCode::DuplicateId:
    case ErrorCode::Overflow:
      return kMalformedInput;
    case ErrorCode::BudgetExceeded:
      return kBudgetExceeded;
    case ErrorCode::InvalidK:
    case ErrorCode::TooFewElements:
    case ErrorCode::InvalidConfig:
      return kInvalidRequest;
  }
  return kInvalidRequest;
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
  std::string input = "-";
  std::size_t k = 1;
  std::optional<std::uint64_t> seed;
  std::string mode = "int";
  std::string algorithm = "cascade";
  int mantissa_bits = kFullKeyPrecision;
};

template <SamplerWeight W>
int run_sample(const SampleOptions& options, std::uint64_t seed, std::istream& in, std::ostream& out,
               std::ostream& err) {
  io::ParsedStream<W> parsed;
  if (options.input == "-") {
    parsed = io::parse_stream<W>(in);
  } else {
    std::ifstream file(options.input, std::ios::binary);
    if (!file) {
      err << "error: cannot open '" << options.input << "'\n";
      return kMalformedInput;
    }
    parsed = io::parse_stream<W>(file);
  }
  const auto& elements = parsed.elements;

  std::vector<WeightedElement<W>> sample;
  if (options.algorithm == "cascade") {
    CascadeSampler<UnitSampler<W>> sampler(options.k, seed);
    for (const auto& e : elements) sampler.feed(e);
    sample = sampler.sample();
  } else if (options.algorithm == "wr") {
    WithReplacementSampler<W> sampler(options.k, seed);
    for (const auto& e : elements) sampler.feed(e);
    sample = sampler.sample();
  } else {
    ExponentSampler<W> sampler(options.k, seed, options.mantissa_bits);
    for (const auto& e : elements) sampler.feed(e);
    sample = sampler.sample();
  }
  if (options.algorithm != "wr" && options.k > elements.size()) {
    err << "warning: k = " << options.k << " exceeds the stream length " << elements.size()
        << "; returning all " << elements.size() << " elements in sampled order\n";
  }

  W total{};
  for (const auto& e : elements) total += e.weight;
  json doc;
  doc["algorithm"] = options.algorithm;
  doc["mode"] = options.mode;
  doc["seed"] = seed;
  doc["k"] = options.k;
  doc["n"] = elements.size();
  doc["total_weight"] = weight_json(total);
  if (options.algorithm == "exponent") doc["mantissa_bits"] = options.mantissa_bits;
  doc["sample"] = json::array();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    doc["sample"].push_back({{"rank", i + 1},
                             {"id", parsed.validator.name(sample[i].id)},
                             {"weight", weight_json(sample[i].weight)}});
  }
  out << doc.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- verify

json stream_json(const std::vector<ExactElement>& stream) {
  json items = json::array();
  for (const auto& e : stream) items.push_back({{"id", to_index(e.id)}, {"weight", weight_json(e.weight)}});
  return items;
}

int run_verify(const oracle::VerifyConfig& config, std::ostream& out, std::ostream& err) {
  const auto report = oracle::verify_lattice(config);
  json records = json::array();
  const oracle::VerifyRecord* first_failure = nullptr;
  for (const auto& record : report.records) {
    json entry{{"n", record.stream.size()},
               {"k", record.k},
               {"assignment", record.assignment},
               {"order", record.order},
               {"stream", stream_json(record.stream)},
               {"verdict", record.pass ? "pass" : "fail"}};
    json checks = json::object();
    for (const auto& check : record.checks) {
      checks[check.name] = check.comparison.equal ? "pass" : "fail";
      if (!check.comparison.equal && !entry.contains("divergence")) {
        const auto& d = *check.comparison.first_divergence;
        entry["divergence"] = {{"check", check.name},
                               {"outcome", oracle::format_outcome(d.outcome)},
                               {"observed", rational_json(d.lhs)},
                               {"expected", rational_json(d.rhs)}};
      }
    }
    entry["checks"] = std::move(checks);
    records.push_back(std::move(entry));
    if (!record.pass && first_failure == nullptr) first_failure = &record;
  }
  json doc{{"max_n", config.max_n},
           {"max_k", config.max_k},
           {"max_weight", config.max_weight},
           {"lattice_seed", config.seed},
           {"records", std::move(records)},
           {"summary", {{"records", report.records.size()}, {"failures", report.failures}}}};
  out << doc.dump(2) << '\n';
  if (first_failure != nullptr) {
    for (const auto& check : first_failure->checks) {
      if (check.comparison.equal) continue;
      const auto& d = *check.comparison.first_divergence;
      err << "divergence: check '" << check.name << "', n = " << first_failure->stream.size()
          << ", k = " << first_failure->k << ", tuple " << oracle::format_outcome(d.outcome)
          << ": got " << d.lhs.str() << ", expected " << d.rhs.str() << '\n';
      break;
    }
    err << report.failures << " of " << report.records.size() << " lattice records failed\n";
    return kCheckFailed;
  }
  err << "all " << report.records.size() << " lattice records passed\n";
  return kOk;
}

// ---------------------------------------------------------------- stat

json stat_json(const stats::StatReport& report) {
  json doc{{"sampler", std::string(stats::to_string(report.sampler))},
           {"trials", report.trials},
           {"cells", report.cells},
           {"chi_square",
            {{"statistic", report.chi_square.statistic},
             {"dof", report.chi_square.dof},
             {"p_value", report.chi_square.p_value}}},
           {"tv_distance", report.tv_distance},
           {"noise_floor", report.noise_floor},
           {"significance", report.significance},
           {"verdict", report.pass ? "pass" : "fail"}};
  if (report.min_inclusion_p) doc["min_inclusion_p"] = *report.min_inclusion_p;
  return doc;
}

void stat_table(const stats::StatReport& report, std::ostream& out) {
  out << std::left << std::setw(12) << "sampler" << std::setw(10) << "trials" << std::setw(14)
      << "chi2" << std::setw(6) << "dof" << std::setw(12) << "p-value" << std::setw(12) << "tv"
      << std::setw(12) << "noise" << "verdict\n";
  out << std::setw(12) << stats::to_string(report.sampler) << std::setw(10) << report.trials
      << std::setw(14) << report.chi_square.statistic << std::setw(6) << report.chi_square.dof
      << std::setw(12) << report.chi_square.p_value << std::setw(12) << report.tv_distance
      << std::setw(12) << report.noise_floor << (report.pass ? "pass" : "fail") << '\n';
}

// ---------------------------------------------------------------- entry

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming weighted sampling without replacement", "cascade"};
  app.require_subcommand(1);

  SampleOptions sample;
  auto* sample_cmd = app.add_subcommand("sample", "Sample k elements from a weighted stream");
  sample_cmd->add_option("input", sample.input, "CSV or JSON-lines file, '-' for standard input");
  sample_cmd->add_option("--k", sample.k, "Sample size");
  sample_cmd->add_option("--seed", sample.seed, "Random seed (default: $CASCADE_SEED or entropy)");
  sample_cmd->add_option("--mode", sample.mode, "Weight arithmetic")->check(CLI::IsMember({"int", "float"}));
  sample_cmd->add_option("--algorithm", sample.algorithm, "Sampler")
      ->check(CLI::IsMember({"cascade", "wr", "exponent"}));
  sample_cmd->add_option("--mantissa-bits", sample.mantissa_bits, "Key precision (exponent only)")
      ->check(CLI::Range(1, kFullKeyPrecision));

  oracle::VerifyConfig verify;
  auto* verify_cmd = app.add_subcommand("verify", "Exact check of the cascade law on a stream lattice");
  verify_cmd->add_option("--max-n", verify.max_n, "Largest stream length");
  verify_cmd->add_option("--max-k", verify.max_k, "Largest sample size");
  verify_cmd->add_option("--max-weight", verify.max_weight, "Largest integer weight");
  verify_cmd->add_option("--per-n", verify.per_n, "Weight assignments per stream length");
  verify_cmd->add_option("--orders", verify.orders, "Arrival orders per assignment");
  verify_cmd->add_option("--lattice-seed", verify.seed, "Lattice generator seed");
  verify_cmd->add_option("--budget", verify.budget.max_branches, "Branch-count cap");
  verify_cmd->add_flag("--break-sampler", verify.mutant, "Replay a deliberately wrong unit sampler")
      ->group("");

  stats::GofConfig stat;
  std::string stat_weights = "1,2,3";
  std::string stat_algorithm = "cascade";
  std::string stat_mode = "int";
  std::string stat_format = "json";
  std::optional<std::uint64_t> stat_seed;
  auto* stat_cmd = app.add_subcommand("stat", "Monte-Carlo goodness of fit against the exact law");
  stat_cmd->add_option("--weights", stat_weights, "Comma-separated weights in arrival order");
  stat_cmd->add_option("--k", stat.k, "Sample size");
  stat_cmd->add_option("--trials", stat.trials, "Independent runs");
  stat_cmd->add_option("--seed", stat_seed, "Master seed");
  stat_cmd->add_option("--significance", stat.significance, "Test level");
  stat_cmd->add_option("--algorithm", stat_algorithm, "Sampler")
      ->check(CLI::IsMember({"cascade", "wr", "exponent", "oversample"}));
  stat_cmd->add_option("--mode", stat_mode, "Weight arithmetic")->check(CLI::IsMember({"int", "float"}));
  stat_cmd->add_option("--mantissa-bits", stat.mantissa_bits, "Key precision (exponent only)")
      ->check(CLI::Range(1, kFullKeyPrecision));
  stat_cmd->add_option("--format", stat_format, "Report format")->check(CLI::IsMember({"json", "table"}));

  std::string precision_weights = "2^40,1,1";
  std::string precision_bits = "8,16,24,53";
  std::size_t precision_k = 2;
  std::uint64_t precision_trials = 1'000'000;
  std::optional<std::uint64_t> precision_seed;
  std::string precision_format = "json";
  auto* precision_cmd =
      app.add_subcommand("compare-precision", "Key-precision effect on the random-key method");
  precision_cmd->add_option("--weights", precision_weights, "Comma-separated weights, 2^N allowed");
  precision_cmd->add_option("--k", precision_k, "Sample size");
  precision_cmd->add_option("--mantissa-bits", precision_bits, "Comma-separated key precisions");
  precision_cmd->add_option("--trials", precision_trials, "Independent runs per sampler");
  precision_cmd->add_option("--seed", precision_seed, "Master seed");
  precision_cmd->add_option("--format", precision_format, "Report format")
      ->check(CLI::IsMember({"json", "table"}));

  bench::BenchConfig bench_config;
  std::string bench_k = "1,2,4,8,16";
  std::string bench_mode = "int";
  std::string bench_distribution = "uniform";
  std::string bench_format = "json";
  std::optional<std::uint64_t> bench_seed;
  auto* bench_cmd = app.add_subcommand("bench", "Time cascade sampling for several k");
  bench_cmd->add_option("--n", bench_config.n, "Stream length");
  bench_cmd->add_option("--k", bench_k, "Comma-separated sample sizes");
  bench_cmd->add_option("--mode", bench_mode, "Weight arithmetic")->check(CLI::IsMember({"int", "float"}));
  bench_cmd->add_option("--seed", bench_seed, "Seed");
  bench_cmd->add_option("--distribution", bench_distribution, "Synthetic weights")
      ->check(CLI::IsMember({"uniform", "zipf", "one-dominant"}));
  bench_cmd->add_option("--format", bench_format, "Report format")->check(CLI::IsMember({"json", "table"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kMalformedInput;
  }

  try {
    if (*sample_cmd) {
      if (sample.k == 0) {
        err << "error: InvalidK: k must be at least 1\n";
        return kInvalidRequest;
      }
      const auto seed = resolve_seed(sample.seed);
      return sample.mode == "int" ? run_sample<ExactWeight>(sample, seed, in, out, err)
                                  : run_sample<FloatWeight>(sample, seed, in, out, err);
    }
    if (*verify_cmd) return run_verify(verify, out, err);
    if (*stat_cmd) {
      stat.weights = io::parse_weight_list(stat_weights);
      stat.sampler = *stats::parse_sampler_kind(stat_algorithm);
      stat.mode = *parse_weight_mode(stat_mode);
      stat.seed = resolve_seed(stat_seed);
      const auto report = stats::gof_test(stat);
      if (stat_format == "table") {
        stat_table(report, out);
      } else {
        auto doc = stat_json(report);
        doc["seed"] = stat.seed;
        doc["k"] = stat.k;
        doc["mode"] = stat_mode;
        out << doc.dump(2) << '\n';
      }
      return report.pass ? kOk : kCheckFailed;
    }
    if (*precision_cmd) {
      std::vector<int> bits;
      for (auto b : parse_size_list(precision_bits)) bits.push_back(static_cast<int>(std::min<std::size_t>(b, 1024)));
      const auto seed = resolve_seed(precision_seed);
      const auto report = stats::precision_experiment(io::parse_weight_list(precision_weights),
                                                      precision_k, bits, precision_trials, seed);
      if (precision_format == "table") {
        out << std::left << std::setw(20) << "sampler" << std::setw(16) << "tv_distance"
            << "above 3x noise\n";
        out << std::setw(20) << "cascade (int)" << std::setw(16) << report.cascade_tv
            << (report.cascade_tv > report.threshold ? "yes" : "no") << '\n';
        for (const auto& row : report.exponent) {
          out << std::setw(20) << ("exponent/" + std::to_string(row.mantissa_bits) + "b")
              << std::setw(16) << row.tv_distance << (row.tv_distance > report.threshold ? "yes" : "no")
              << '\n';
        }
        out << "noise floor " << report.noise_floor << ", threshold " << report.threshold << '\n';
      } else {
        json rows = json::array();
        for (const auto& row : report.exponent) {
          rows.push_back({{"mantissa_bits", row.mantissa_bits},
                          {"tv_distance", row.tv_distance},
                          {"above_threshold", row.tv_distance > report.threshold}});
        }
        json doc{{"weights", precision_weights},
                 {"k", precision_k},
                 {"trials", report.trials},
                 {"seed", seed},
                 {"noise_floor", report.noise_floor},
                 {"threshold", report.threshold},
                 {"cascade", {{"mode", "int"}, {"tv_distance", report.cascade_tv},
                              {"above_threshold", report.cascade_tv > report.threshold}}},
                 {"exponent", std::move(rows)}};
        out << doc.dump(2) << '\n';
      }
      return kOk;
    }
    if (*bench_cmd) {
      bench_config.k_values = parse_size_list(bench_k);
      bench_config.mode = *parse_weight_mode(bench_mode);
      bench_config.distribution = *bench::parse_weight_distribution(bench_distribution);
      bench_config.seed = resolve_seed(bench_seed);
      const auto report = bench::run_bench(bench_config);
      if (bench_format == "table") {
        out << std::left << std::setw(6) << "k" << std::setw(14) << "seconds" << std::setw(14)
            << "ns/element" << std::setw(14) << "state bytes" << std::setw(12) << "time ratio"
            << "size ratio\n";
        for (const auto& row : report.rows) {
          out << std::setw(6) << row.k << std::setw(14) << row.seconds << std::setw(14)
              << row.ns_per_element << std::setw(14) << row.state_bytes << std::setw(12)
              << row.time_ratio << row.size_ratio << '\n';
        }
        out << "bare unit sampler: " << report.unit_seconds << " s\n";
      } else {
        json rows = json::array();
        for (const auto& row : report.rows) {
          rows.push_back({{"k", row.k},
                          {"seconds", row.seconds},
                          {"ns_per_element", row.ns_per_element},
                          {"state_bytes", row.state_bytes},
                          {"time_ratio", row.time_ratio},
                          {"size_ratio", row.size_ratio}});
        }
        json doc{{"n", bench_config.n},
                 {"mode", bench_mode},
                 {"distribution", bench_distribution},
                 {"seed", bench_config.seed},
                 {"unit_seconds", report.unit_seconds},
                 {"rows", std::move(rows)}};
        out << doc.dump(2) << '\n';
      }
      return kOk;
    }
  } catch (const io::InputError& e) {
    err << "error: " << e.what() << '\n';
    return kMalformedInput;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kOk;
}

}  // namespace cascade::cli
