// redunsense: command-line front end for component-set generation, microstate
// counting, single-realization analysis and Monte Carlo sweeps.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "redunsense/components.hpp"
#include "redunsense/errors.hpp"
#include "redunsense/experiments.hpp"
#include "redunsense/metrics.hpp"
#include "redunsense/microstates.hpp"
#include "redunsense/selection.hpp"
#include "redunsense/text_io.hpp"

namespace fs = std::filesystem;
using namespace redunsense;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

// Raised for problems with the invocation itself.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenArgs {
  std::string arch;
  int bits = 0;
  int replicas = 2;
  std::string out;
};

struct CountArgs {
  std::string set_path;
  Code code = -1;
  bool all = false;
  std::string out;
};

struct AnalyzeArgs {
  std::string set_path;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string strategy = "canonical";
  std::int64_t swap_budget = kDefaultSwapBudget;
  std::int64_t swap_size = kDefaultSwapSize;
  std::string mode = "gain_normalized";
  std::string out;
};

struct SweepArgs {
  std::string config_path;
  std::string out_dir;
};

struct CompareArgs {
  std::vector<std::string> inputs;
};

ComponentSet load_set_or_usage(const std::string& path) {
  try {
    return load_custom(path);
  } catch (const SchemaError& e) {
    throw UsageError(e.what());
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
}

int run_gen(const GenArgs& a) {
  ComponentSet set = [&] {
    try {
      switch (parse_architecture(a.arch)) {
        case Architecture::cos: return gen_binary(a.bits);
        case Architecture::res: return gen_dual_binary(a.bits);
        case Architecture::crs: return gen_replicated(a.bits, a.replicas);
        case Architecture::custom: break;
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    throw UsageError("gen: --arch must be one of cos, crs, res");
  }();
  const fs::path out = a.out.empty() ? fs::path(set.id() + ".json") : fs::path(a.out);
  write_file_atomic(out, to_json(set).dump() + "\n");
  std::cout << set.unit_total() << " unit components\n";
  return 0;
}

int run_count(const CountArgs& a) {
  if (a.all == (a.code >= 0)) throw UsageError("count: give exactly one of --code or --all");
  const ComponentSet set = load_set_or_usage(a.set_path);
  if (!a.all) {
    if (a.code > set.full_scale()) {
      throw UsageError("count: --code " + std::to_string(a.code) + " exceeds full scale " +
                       std::to_string(set.full_scale()));
    }
    std::cout << count_microstates(set, a.code) << "\n";
    return 0;
  }
  std::ostringstream csv;
  write_capacity_csv(capacity_profile(set), csv);
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file_atomic(a.out, csv.str());
  }
  return 0;
}

int run_analyze(const AnalyzeArgs& a) {
  const ComponentSet set = load_set_or_usage(a.set_path);
  SelectionStrategy strategy;
  ErrorMode mode;
  try {
    strategy.kind = parse_strategy_kind(a.strategy);
    if (strategy.kind == StrategyKind::greedy && a.swap_budget != kDefaultSwapBudget) {
      strategy.params["swap_budget"] = a.swap_budget;
    }
    if (strategy.kind == StrategyKind::greedy && a.swap_size != kDefaultSwapSize) {
      strategy.params["swap_size"] = a.swap_size;
    }
    mode = parse_error_mode(a.mode);
    if (!(a.sigma >= 0.0)) throw std::invalid_argument("--sigma must be >= 0");
    check_admissible(set, strategy);
  } catch (const StrategyMismatch& e) {
    throw UsageError(std::string("analyze: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("analyze: ") + e.what());
  }

  const RealizedSet realized = realize(set, MismatchModel{a.sigma}, a.seed);
  const TransferFunction tf = transfer_function(realized, strategy);
  const AccuracyReport rep = summary(tf, mode);
  std::ostringstream csv;
  write_metrics_csv(tf, mode, csv);
  write_file_atomic(a.out, csv.str());
  std::cout << "max_inl " << format_double(rep.max_inl) << "\n"
            << "rms_inl " << format_double(rep.rms_inl) << "\n"
            << "max_dnl " << format_double(rep.max_dnl) << "\n";
  return 0;
}

int run_sweep_cmd(const SweepArgs& a) {
  ExperimentConfig config;
  try {
    config = load_config(a.config_path);
  } catch (const SchemaError& e) {
    throw UsageError(std::string("sweep: ") + e.what());
  } catch (const IoError& e) {
    throw UsageError(std::string("sweep: ") + e.what());
  }
  const ResultTable table = run_sweep(config);
  report(table, ReportFormat::csv, a.out_dir);
  report(table, ReportFormat::json, a.out_dir);
  std::cout << "rows " << table.rows.size() << "\n"
            << "reseeds " << table.reseeds << "\n";
  write_aggregates_csv(table, std::cout);
  return 0;
}

ResultTable load_results(const fs::path& input) {
  const fs::path file = fs::is_directory(input) ? input / "results.json" : input;
  try {
    return table_from_json(nlohmann::json::parse(read_file(file)));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(file.string() + ": JSON parse error: " + e.what());
  } catch (const SchemaError& e) {
    throw UsageError(file.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
}

int run_compare(const CompareArgs& a) {
  std::vector<ResultTable> tables;
  for (const std::string& in : a.inputs) tables.push_back(load_results(in));
  ResultTable merged;
  try {
    merged = merge_tables(tables);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("compare: ") + e.what());
  }
  std::cout << "arch,strategy,N,sigma,mean_max_inl,improvement_ratio\n";
  for (const Aggregate& g : merged.aggregates) {
    std::cout << g.arch << ',' << g.strategy << ',' << g.n << ',' << format_double(g.sigma) << ','
              << format_double(g.mean_max_inl) << ',' << format_double(g.improvement_ratio)
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Redundant sensing simulator: microstates, selection and mismatch sweeps"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a generated component-set file");
  gen_cmd->add_option("--arch", gen.arch, "cos, crs or res")->required();
  gen_cmd->add_option("--bits", gen.bits, "Resolution N")->required();
  gen_cmd->add_option("--replicas", gen.replicas, "Replica count for crs")->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "Output path (default: <id>.json)");

  CountArgs count;
  auto* count_cmd = app.add_subcommand("count", "Count microstates of a component set");
  count_cmd->add_option("set", count.set_path, "Component-set file")->required();
  count_cmd->add_option("--code", count.code, "Single code to count");
  count_cmd->add_flag("--all", count.all, "Capacity profile CSV for every code");
  count_cmd->add_option("-o,--out", count.out, "CSV path for --all (default: stdout)");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Metrics of one mismatch realization");
  analyze_cmd->add_option("set", analyze.set_path, "Component-set file")->required();
  analyze_cmd->add_option("--sigma", analyze.sigma, "Unit-component mismatch std")->required();
  analyze_cmd->add_option("--seed", analyze.seed, "Realization seed")->required();
  analyze_cmd->add_option("--strategy", analyze.strategy,
                          "brute_force, mitm, split_dp, greedy, replica_best, canonical")
      ->capture_default_str();
  analyze_cmd->add_option("--swap-budget", analyze.swap_budget, "Greedy pass budget")
      ->capture_default_str();
  analyze_cmd->add_option("--swap-size", analyze.swap_size, "Greedy move size (members exchanged)")
      ->capture_default_str();
  analyze_cmd->add_option("--mode", analyze.mode, "gain_normalized or raw")->capture_default_str();
  analyze_cmd->add_option("-o,--out", analyze.out, "Metrics CSV path")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a Monte Carlo sweep from a config file");
  sweep_cmd->add_option("config", sweep.config_path, "Experiment config JSON")->required();
  sweep_cmd->add_option("-o,--out-dir", sweep.out_dir, "Directory for result files")->required();

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Merge result tables and print improvement ratios");
  compare_cmd->add_option("results", compare.inputs, "results.json files or sweep directories")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*count_cmd) return run_count(count);
    if (*analyze_cmd) return run_analyze(analyze);
    if (*sweep_cmd) return run_sweep_cmd(sweep);
    if (*compare_cmd) return run_compare(compare);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
