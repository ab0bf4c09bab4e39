#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "redunsense/components.hpp"
#include "redunsense/metrics.hpp"
#include "redunsense/selection.hpp"

namespace redunsense {

/// One architecture of a sweep. The resolution comes from the config's
/// n_list, except for CUSTOM sets which run once at their own resolution.
struct ArchitectureSpec {
  Architecture arch = Architecture::cos;
  int replicas = 2;                          // CRS only
  std::filesystem::path path;                // CUSTOM only
  std::vector<SelectionStrategy> strategies; // empty: use the config default

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

struct ExperimentConfig {
  std::vector<ArchitectureSpec> architectures;
  std::vector<SelectionStrategy> strategies;
  std::vector<double> sigma_list;
  std::vector<int> n_list;
  int trials = 1;
  std::uint64_t base_seed = 0;
  ErrorMode mode = ErrorMode::gain_normalized;
};

/// Upper bound on trials * |sigma_list| * |n_list|.
inline constexpr std::int64_t kMaxSweepUnits = 10'000'000;

/// Seed offset applied per retry when a realization is degenerate.
inline constexpr std::uint64_t kReseedOffset = std::uint64_t{1} << 32;

/// Parses and validates a config document; unknown keys are rejected.
/// Throws SchemaError whose message starts with the offending field path.
/// Relative custom-set paths resolve against base_dir when it is non-empty.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks ranges, the size guard and every (architecture, strategy, N) pair.
void validate(const ExperimentConfig& config);

struct ResultRow {
  std::string arch;
  std::string strategy;
  int n = 0;
  double sigma = 0.0;
  int trial = 0;
  double max_inl = 0.0;
  double rms_inl = 0.0;
  double max_dnl = 0.0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct Aggregate {
  std::string arch;
  std::string strategy;
  int n = 0;
  double sigma = 0.0;
  double mean_max_inl = 0.0;
  double std_max_inl = 0.0;
  double p95_max_inl = 0.0;
  double improvement_ratio = 0.0;  // NaN when undefined
};

struct ResultTable {
  std::vector<ResultRow> rows;         // sorted by (arch, strategy, N, sigma, trial)
  std::vector<Aggregate> aggregates;   // sorted by (arch, strategy, N, sigma)
  std::uint64_t reseeds = 0;
};

/// Sorts rows and derives the aggregates. The improvement ratio of a group is
/// mean_max_inl(cos/canonical at the same N and sigma) / mean_max_inl(group).
ResultTable make_table(std::vector<ResultRow> rows, std::uint64_t reseeds);

/// Concatenates tables. Identical duplicate rows collapse; conflicting ones throw.
ResultTable merge_tables(const std::vector<ResultTable>& tables);

/// Sweep parallelism: `requested` if nonzero, else REDUNSENSE_THREADS, else
/// the hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

/// Runs every (architecture, N, sigma, trial) unit. Trial t of every
/// architecture is realized from seed base_seed + t. Output is independent of
/// the thread count.
ResultTable run_sweep(const ExperimentConfig& config, unsigned threads = 0);

std::string arch_label(const ComponentSet& set);

enum class ReportFormat { csv, json };

void write_rows_csv(const ResultTable& table, std::ostream& out);
void write_aggregates_csv(const ResultTable& table, std::ostream& out);
ResultTable rows_from_csv(std::istream& in);

nlohmann::json to_json(const ResultTable& table);
ResultTable table_from_json(const nlohmann::json& doc);

/// csv: writes rows.csv and aggregates.csv into out_dir; json: results.json.
void report(const ResultTable& table, ReportFormat format, const std::filesystem::path& out_dir);

}  // namespace redunsense
