#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redunsense/components.hpp"
#include "redunsense/microstates.hpp"

namespace redunsense {

enum class StrategyKind { brute_force, mitm, split_dp, greedy, replica_best, canonical };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view name);

inline constexpr std::int64_t kDefaultSwapBudget = 16;
/// Greedy moves exchange up to swap_size members for up to swap_size others.
inline constexpr std::int64_t kDefaultSwapSize = 2;
inline constexpr std::int64_t kMaxSwapSize = 4;
inline constexpr std::size_t kBruteForceMaxComponents = 22;
inline constexpr std::size_t kMitmMaxComponents = 40;
inline constexpr std::size_t kSplitDpMaxGroupSize = 20;

struct SelectionStrategy {
  StrategyKind kind = StrategyKind::canonical;
  std::map<std::string, std::int64_t> params;  // "swap_budget", "swap_size" for greedy

  std::int64_t swap_budget() const;
  std::int64_t swap_size() const;
  /// Kind name, followed by ":key=value" for each parameter.
  std::string label() const;

  friend bool operator==(const SelectionStrategy&, const SelectionStrategy&) = default;
};

/// Parses a label produced by SelectionStrategy::label().
SelectionStrategy parse_strategy(std::string_view label);

/// Throws StrategyMismatch or ResourceLimit when `strategy` cannot run on `set`.
void check_admissible(const ComponentSet& set, const SelectionStrategy& strategy);

/// Gain-normalized reference line: ideal(code) = code * total / full_scale.
/// Both endpoints are exact: ideal(0) = 0 and ideal(full_scale) = total.
struct Reference {
  double total = 0.0;
  Code full_scale = 1;

  double ideal(Code code) const;
  double lsb() const { return total / static_cast<double>(full_scale); }
};

/// Line through the origin and the full-scale assembly, taken as the
/// lexicographically first microstate of full_scale (every component, or the
/// first replica for CRS). `values` are summed in index order.
Reference reference_from(const ComponentSet& set, std::span<const double> values);
Reference reference_of(const RealizedSet& realized);
double ideal_value(const RealizedSet& realized, Code code);

struct Selection {
  Code code = 0;
  Assembly assembly;
  double achieved = 0.0;  // sum of component values in index order
  double objective_error = 0.0;

  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Evaluates an assembly against values and a reference.
Selection evaluate(Code code, IndexList members, std::span<const double> values,
                   const Reference& reference);

namespace detail {
class Solver;
}

/// A solver bound to one set of component values. Tables are built once in
/// the constructor and shared read-only by every select() call, so one
/// Selector may serve many codes concurrently.
class Selector {
 public:
  /// Selection driven by the realized values and their own reference.
  Selector(const RealizedSet& realized, const SelectionStrategy& strategy);

  /// Selection driven by arbitrary component values (e.g. estimates) and an
  /// explicit reference line. `values` need not be positive.
  Selector(const ComponentSet& set, std::vector<double> values, const Reference& reference,
           const SelectionStrategy& strategy);

  Selection select(Code code) const;
  const SelectionStrategy& strategy() const { return strategy_; }

 private:
  SelectionStrategy strategy_;
  std::shared_ptr<const detail::Solver> solver_;
};

Selection select(const RealizedSet& realized, Code code, const SelectionStrategy& strategy);

Selection select_bruteforce(const RealizedSet& realized, Code code);
Selection select_mitm(const RealizedSet& realized, Code code);
Selection select_split_dp(const RealizedSet& realized, Code code);
Selection select_greedy(const RealizedSet& realized, Code code,
                        std::int64_t swap_budget = kDefaultSwapBudget);
Selection select_replica(const RealizedSet& realized, Code code);
/// Lexicographically first microstate, no optimization.
Selection select_canonical(const RealizedSet& realized, Code code);

/// Mean achieved value of k microstates of `code` drawn uniformly with
/// replacement, keyed on (seed, draw index).
double ensemble_average(const RealizedSet& realized, Code code, int k, std::uint64_t seed);

}  // namespace redunsense
