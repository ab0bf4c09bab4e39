#include "redunsense/selection.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "redunsense/errors.hpp"
#include "redunsense/rng.hpp"

namespace redunsense {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::brute_force: return "brute_force";
    case StrategyKind::mitm: return "mitm";
    case StrategyKind::split_dp: return "split_dp";
    case StrategyKind::greedy: return "greedy";
    case StrategyKind::replica_best: return "replica_best";
    case StrategyKind::canonical: return "canonical";
  }
  return "canonical";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (StrategyKind k : {StrategyKind::brute_force, StrategyKind::mitm, StrategyKind::split_dp,
                         StrategyKind::greedy, StrategyKind::replica_best,
                         StrategyKind::canonical}) {
    if (lower == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown selection strategy '" + std::string(name) + "'");
}

std::int64_t SelectionStrategy::swap_budget() const {
  const auto it = params.find("swap_budget");
  return it == params.end() ? kDefaultSwapBudget : it->second;
}

std::int64_t SelectionStrategy::swap_size() const {
  const auto it = params.find("swap_size");
  return it == params.end() ? kDefaultSwapSize : it->second;
}

std::string SelectionStrategy::label() const {
  std::string out(to_string(kind));
  for (const auto& [key, value] : params) out += ":" + key + "=" + std::to_string(value);
  return out;
}

SelectionStrategy parse_strategy(std::string_view label) {
  SelectionStrategy s;
  const auto colon = label.find(':');
  s.kind = parse_strategy_kind(label.substr(0, colon));
  std::string_view rest = colon == std::string_view::npos ? "" : label.substr(colon + 1);
  while (!rest.empty()) {
    const auto next = rest.find(':');
    const std::string_view item = rest.substr(0, next);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw std::invalid_argument("malformed strategy parameter '" + std::string(item) + "'");
    }
    try {
      s.params[std::string(item.substr(0, eq))] = std::stoll(std::string(item.substr(eq + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed strategy parameter '" + std::string(item) + "'");
    }
    rest = next == std::string_view::npos ? "" : rest.substr(next + 1);
  }
  return s;
}

void check_admissible(const ComponentSet& set, const SelectionStrategy& strategy) {
  std::size_t widest = 0;
  for (const IndexList& d : set.domains()) widest = std::max(widest, d.size());
  const std::string name(to_string(strategy.kind));

  switch (strategy.kind) {
    case StrategyKind::brute_force:
      if (widest > kBruteForceMaxComponents) {
        throw ResourceLimit("brute_force: " + std::to_string(widest) +
                            " components exceed the enumeration guard of " +
                            std::to_string(kBruteForceMaxComponents));
      }
      break;
    case StrategyKind::mitm:
      if (widest > kMitmMaxComponents) {
        throw ResourceLimit("mitm: " + std::to_string(widest) + " components exceed " +
                            std::to_string(kMitmMaxComponents));
      }
      break;
    case StrategyKind::split_dp:
      if (set.arch() == Architecture::crs || set.groups().size() != 2) {
        throw StrategyMismatch("split_dp requires a non-replicated set with exactly 2 groups; '" +
                               set.id() + "' is " + std::string(to_string(set.arch())) +
                               " with " + std::to_string(set.groups().size()) + " groups");
      }
      for (const IndexList& g : set.groups()) {
        if (g.size() > kSplitDpMaxGroupSize) {
          throw ResourceLimit("split_dp: group of " + std::to_string(g.size()) +
                              " components exceeds " + std::to_string(kSplitDpMaxGroupSize));
        }
      }
      break;
    case StrategyKind::replica_best:
      if (set.arch() != Architecture::crs) {
        throw StrategyMismatch("replica_best requires a crs set; '" + set.id() + "' is " +
                               std::string(to_string(set.arch())));
      }
      break;
    case StrategyKind::greedy:
      if (strategy.swap_budget() < 0) throw std::invalid_argument("swap_budget must be >= 0");
      if (strategy.swap_size() < 1 || strategy.swap_size() > kMaxSwapSize) {
        throw std::invalid_argument("swap_size must be in [1, " + std::to_string(kMaxSwapSize) + "]");
      }
      break;
    case StrategyKind::canonical:
      break;
  }
  for (const auto& [key, _] : strategy.params) {
    if (strategy.kind != StrategyKind::greedy || (key != "swap_budget" && key != "swap_size")) {
      throw std::invalid_argument(name + ": unknown parameter '" + key + "'");
    }
  }
}

double Reference::ideal(Code code) const {
  if (code == full_scale) return total;
  return (static_cast<double>(code) * total) / static_cast<double>(full_scale);
}

Reference reference_from(const ComponentSet& set, std::span<const double> values) {
  return Reference{sum_over(values, set.domains().front()), set.full_scale()};
}

Reference reference_of(const RealizedSet& realized) {
  return reference_from(realized.base(), realized.actual());
}

double ideal_value(const RealizedSet& realized, Code code) {
  if (code < 0 || code > realized.base().full_scale()) {
    throw std::invalid_argument("code " + std::to_string(code) + " out of range");
  }
  return reference_of(realized).ideal(code);
}

Selection evaluate(Code code, IndexList members, std::span<const double> values,
                   const Reference& reference) {
  Selection s;
  s.code = code;
  s.achieved = sum_over(values, members);
  s.objective_error = std::abs(s.achieved - reference.ideal(code));
  s.assembly = Assembly{std::move(members), code};
  return s;
}

namespace {

// Lower error wins; equal errors go to the lexicographically smaller assembly.
bool better(const Selection& a, const Selection& b) {
  if (a.objective_error != b.objective_error) return a.objective_error < b.objective_error;
  return a.assembly.members < b.assembly.members;
}

void keep_best(std::optional<Selection>& best, Selection candidate) {
  if (!best || better(candidate, *best)) best = std::move(candidate);
}

[[noreturn]] void throw_no_assembly(const ComponentSet& set, Code code) {
  throw NoAssembly("code " + std::to_string(code) + " has no assembly in '" + set.id() + "'");
}

}  // namespace

namespace detail {

class Solver {
 public:
  Solver(const ComponentSet& set, std::vector<double> values, const Reference& ref)
      : set_(set), values_(std::move(values)), ref_(ref) {}
  virtual ~Solver() = default;

  Selection run(Code code) const {
    if (code < 0 || code > set_.full_scale()) {
      throw std::invalid_argument("code " + std::to_string(code) + " outside [0, " +
                                  std::to_string(set_.full_scale()) + "]");
    }
    return solve(code);
  }

 protected:
  virtual Selection solve(Code code) const = 0;

  Selection eval(Code code, IndexList members) const {
    return evaluate(code, std::move(members), values_, ref_);
  }

  ComponentSet set_;
  std::vector<double> values_;
  Reference ref_;
};

namespace {

class BruteForceSolver final : public Solver {
 public:
  using Solver::Solver;

  Selection solve(Code code) const override {
    std::optional<Selection> best;
    const double ideal = ref_.ideal(code);
    index_.for_each(code, [&](std::span<const std::size_t> members) {
      const double err = std::abs(sum_over(values_, members) - ideal);
      // Visits arrive in lexicographic order, so a strict test keeps the first tie.
      if (!best || err < best->objective_error) {
        best = eval(code, IndexList(members.begin(), members.end()));
      }
      return true;
    });
    if (!best) throw_no_assembly(set_, code);
    return *best;
  }

 private:
  MicrostateIndex index_{set_};
};

// Exact two-part join shared by meet-in-the-middle and the split solver. Each
// domain is cut into two index lists; every subset of each part is tabulated
// once, and a code is answered by pairing part-P subsets with part-Q subsets of
// complementary nominal sum. Partial sums are only used to locate candidates:
// everything within a small window of the best pairing is re-evaluated with
// index-ordered sums so results match the brute-force solver bit for bit.
class JoinSolver final : public Solver {
 public:
  struct Entry {
    Weight nominal;
    double value;
    std::uint32_t mask;
  };
  struct Part {
    IndexList indices;
    std::vector<Entry> entries;  // sorted by (nominal, value, mask)
  };

  JoinSolver(const ComponentSet& set, std::vector<double> values, const Reference& ref,
             const std::vector<std::pair<IndexList, IndexList>>& cuts)
      : Solver(set, std::move(values), ref) {
    double magnitude = 0.0;
    for (double v : values_) magnitude += std::abs(v);
    slack_ = 1e-9 * (1.0 + magnitude);
    for (const auto& [p, q] : cuts) pairs_.emplace_back(tabulate(p), tabulate(q));
  }

  Selection solve(Code code) const override {
    std::optional<Selection> best;
    for (const auto& [p, q] : pairs_) {
      if (auto s = solve_pair(p, q, code)) keep_best(best, std::move(*s));
    }
    if (!best) throw_no_assembly(set_, code);
    return *best;
  }

 private:
  Part tabulate(IndexList indices) const {
    std::sort(indices.begin(), indices.end());
    Part part;
    part.indices = std::move(indices);
    const std::size_t m = part.indices.size();
    part.entries.reserve(std::size_t{1} << m);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
      Entry e{0, 0.0, mask};
      for (std::size_t k = 0; k < m; ++k) {
        if ((mask >> k) & 1U) {
          e.nominal += set_.weight(part.indices[k]);
          e.value += values_[part.indices[k]];
        }
      }
      part.entries.push_back(e);
    }
    std::sort(part.entries.begin(), part.entries.end(), [](const Entry& a, const Entry& b) {
      if (a.nominal != b.nominal) return a.nominal < b.nominal;
      if (a.value != b.value) return a.value < b.value;
      return a.mask < b.mask;
    });
    return part;
  }

  static std::pair<std::size_t, std::size_t> bucket(const Part& part, Weight nominal) {
    const auto lo = std::lower_bound(part.entries.begin(), part.entries.end(), nominal,
                                     [](const Entry& e, Weight n) { return e.nominal < n; });
    const auto hi = std::upper_bound(lo, part.entries.end(), nominal,
                                     [](Weight n, const Entry& e) { return n < e.nominal; });
    return {static_cast<std::size_t>(lo - part.entries.begin()),
            static_cast<std::size_t>(hi - part.entries.begin())};
  }

  // First position in [lo, hi) whose value is >= target.
  static std::size_t value_bound(const Part& part, std::size_t lo, std::size_t hi, double target) {
    const auto it = std::lower_bound(part.entries.begin() + static_cast<std::ptrdiff_t>(lo),
                                     part.entries.begin() + static_cast<std::ptrdiff_t>(hi),
                                     target,
                                     [](const Entry& e, double t) { return e.value < t; });
    return static_cast<std::size_t>(it - part.entries.begin());
  }

  std::optional<Selection> solve_pair(const Part& p, const Part& q, Code code) const {
    const double ideal = ref_.ideal(code);

    double best_approx = std::numeric_limits<double>::infinity();
    for (const Entry& a : p.entries) {
      if (a.nominal > code) break;
      const auto [lo, hi] = bucket(q, code - a.nominal);
      if (lo == hi) continue;
      const double target = ideal - a.value;
      const std::size_t at = value_bound(q, lo, hi, target);
      if (at < hi) best_approx = std::min(best_approx, std::abs(a.value + q.entries[at].value - ideal));
      if (at > lo) {
        best_approx = std::min(best_approx, std::abs(a.value + q.entries[at - 1].value - ideal));
      }
    }
    if (!std::isfinite(best_approx)) return std::nullopt;

    const double window = best_approx + slack_;
    std::optional<Selection> best;
    for (const Entry& a : p.entries) {
      if (a.nominal > code) break;
      const auto [lo, hi] = bucket(q, code - a.nominal);
      if (lo == hi) continue;
      const double target = ideal - a.value;
      for (std::size_t at = value_bound(q, lo, hi, target - 2.0 * window);
           at < hi && q.entries[at].value <= target + 2.0 * window; ++at) {
        if (std::abs(a.value + q.entries[at].value - ideal) > window) continue;
        keep_best(best, eval(code, merge(p, a.mask, q, q.entries[at].mask)));
      }
    }
    return best;
  }

  static IndexList merge(const Part& p, std::uint32_t pmask, const Part& q, std::uint32_t qmask) {
    IndexList members;
    for (std::size_t k = 0; k < p.indices.size(); ++k) {
      if ((pmask >> k) & 1U) members.push_back(p.indices[k]);
    }
    for (std::size_t k = 0; k < q.indices.size(); ++k) {
      if ((qmask >> k) & 1U) members.push_back(q.indices[k]);
    }
    std::sort(members.begin(), members.end());
    return members;
  }

  double slack_ = 0.0;
  std::vector<std::pair<Part, Part>> pairs_;
};

class GreedySolver final : public Solver {
 public:
  GreedySolver(const ComponentSet& set, std::vector<double> values, const Reference& ref,
               std::int64_t budget, std::int64_t swap_size)
      : Solver(set, std::move(values), ref),
        budget_(budget),
        swap_size_(static_cast<std::size_t>(swap_size)) {}

  Selection solve(Code code) const override {
    const std::optional<Assembly> start = index_.first(code);
    if (!start) throw_no_assembly(set_, code);
    Selection current = eval(code, start->members);
    if (current.assembly.members.empty()) return current;

    const IndexList& domain = domain_of(current.assembly.members.front());
    const double ideal = ref_.ideal(code);

    for (std::int64_t pass = 0; pass < budget_; ++pass) {
      const IndexList& members = current.assembly.members;
      IndexList outside;
      std::set_difference(domain.begin(), domain.end(), members.begin(), members.end(),
                          std::back_inserter(outside));

      const std::vector<Move> outs = moves_of(members);
      std::map<Weight, std::vector<Move>> ins;
      for (Move& m : moves_of(outside)) ins[m.nominal].push_back(m);

      const Move* best_out = nullptr;
      const Move* best_in = nullptr;
      double best_err = current.objective_error;
      for (const Move& out : outs) {
        const auto it = ins.find(out.nominal);
        if (it == ins.end()) continue;
        for (const Move& in : it->second) {
          const double err = std::abs(current.achieved - out.value + in.value - ideal);
          if (err < best_err) {
            best_err = err;
            best_out = &out;
            best_in = &in;
          }
        }
      }
      if (best_out == nullptr) break;

      IndexList next;
      const auto removed = best_out->members();
      for (std::size_t idx : members) {
        if (std::find(removed.begin(), removed.end(), idx) == removed.end()) next.push_back(idx);
      }
      for (std::size_t idx : best_in->members()) next.push_back(idx);
      std::sort(next.begin(), next.end());
      Selection candidate = eval(code, std::move(next));
      if (!(candidate.objective_error < current.objective_error)) break;
      current = std::move(candidate);
    }
    return current;
  }

 private:
  struct Move {
    Weight nominal = 0;
    double value = 0.0;
    std::array<std::size_t, kMaxSwapSize> idx{};
    std::size_t size = 0;

    std::span<const std::size_t> members() const { return {idx.data(), size}; }
  };

  // Nonempty subsets of `pool` with at most swap_size_ members, in
  // lexicographic order of their index tuples.
  std::vector<Move> moves_of(const IndexList& pool) const {
    std::vector<Move> out;
    Move m;
    const auto extend = [&](auto&& self, std::size_t from, Weight nominal, double value) -> void {
      for (std::size_t a = from; a < pool.size(); ++a) {
        const std::size_t i = pool[a];
        m.idx[m.size++] = i;
        m.nominal = nominal + set_.weight(i);
        m.value = value + values_[i];
        out.push_back(m);
        if (m.size < swap_size_) self(self, a + 1, m.nominal, m.value);
        --m.size;
      }
    };
    extend(extend, 0, 0, 0.0);
    return out;
  }

  const IndexList& domain_of(std::size_t idx) const {
    for (const IndexList& d : set_.domains()) {
      if (std::binary_search(d.begin(), d.end(), idx)) return d;
    }
    return set_.domains().front();
  }

  std::int64_t budget_;
  std::size_t swap_size_;
  MicrostateIndex index_{set_};
};

class ReplicaSolver final : public Solver {
 public:
  using Solver::Solver;

  Selection solve(Code code) const override {
    std::optional<Selection> best;
    for (std::size_t d = 0; d < set_.domains().size(); ++d) {
      if (auto a = index_.first_in_domain(d, code)) keep_best(best, eval(code, a->members));
    }
    if (!best) throw_no_assembly(set_, code);
    return *best;
  }

 private:
  MicrostateIndex index_{set_};
};

class CanonicalSolver final : public Solver {
 public:
  using Solver::Solver;

  Selection solve(Code code) const override {
    const std::optional<Assembly> a = index_.first(code);
    if (!a) throw_no_assembly(set_, code);
    return eval(code, a->members);
  }

 private:
  MicrostateIndex index_{set_};
};

std::shared_ptr<const Solver> make_solver(const ComponentSet& set, std::vector<double> values,
                                          const Reference& ref,
                                          const SelectionStrategy& strategy) {
  check_admissible(set, strategy);
  switch (strategy.kind) {
    case StrategyKind::brute_force:
      return std::make_shared<BruteForceSolver>(set, std::move(values), ref);
    case StrategyKind::mitm: {
      std::vector<std::pair<IndexList, IndexList>> cuts;
      for (const IndexList& d : set.domains()) {
        const auto half = static_cast<std::ptrdiff_t>(d.size() / 2);
        cuts.emplace_back(IndexList(d.begin(), d.begin() + half), IndexList(d.begin() + half, d.end()));
      }
      return std::make_shared<JoinSolver>(set, std::move(values), ref, cuts);
    }
    case StrategyKind::split_dp:
      return std::make_shared<JoinSolver>(
          set, std::move(values), ref,
          std::vector<std::pair<IndexList, IndexList>>{{set.groups()[0], set.groups()[1]}});
    case StrategyKind::greedy:
      return std::make_shared<GreedySolver>(set, std::move(values), ref, strategy.swap_budget(),
                                            strategy.swap_size());
    case StrategyKind::replica_best:
      return std::make_shared<ReplicaSolver>(set, std::move(values), ref);
    case StrategyKind::canonical:
      return std::make_shared<CanonicalSolver>(set, std::move(values), ref);
  }
  throw std::logic_error("unhandled strategy");
}

}  // namespace
}  // namespace detail

Selector::Selector(const RealizedSet& realized, const SelectionStrategy& strategy)
    : Selector(realized.base(),
               std::vector<double>(realized.actual().begin(), realized.actual().end()),
               reference_of(realized), strategy) {}

Selector::Selector(const ComponentSet& set, std::vector<double> values,
                   const Reference& reference, const SelectionStrategy& strategy)
    : strategy_(strategy) {
  if (values.size() != set.size()) {
    throw std::invalid_argument("component values must match the component count");
  }
  solver_ = detail::make_solver(set, std::move(values), reference, strategy);
}

Selection Selector::select(Code code) const { return solver_->run(code); }

Selection select(const RealizedSet& realized, Code code, const SelectionStrategy& strategy) {
  return Selector(realized, strategy).select(code);
}

Selection select_bruteforce(const RealizedSet& realized, Code code) {
  return select(realized, code, {StrategyKind::brute_force, {}});
}

Selection select_mitm(const RealizedSet& realized, Code code) {
  return select(realized, code, {StrategyKind::mitm, {}});
}

Selection select_split_dp(const RealizedSet& realized, Code code) {
  return select(realized, code, {StrategyKind::split_dp, {}});
}

Selection select_greedy(const RealizedSet& realized, Code code, std::int64_t swap_budget) {
  return select(realized, code, {StrategyKind::greedy, {{"swap_budget", swap_budget}}});
}

Selection select_replica(const RealizedSet& realized, Code code) {
  return select(realized, code, {StrategyKind::replica_best, {}});
}

Selection select_canonical(const RealizedSet& realized, Code code) {
  return select(realized, code, {StrategyKind::canonical, {}});
}

double ensemble_average(const RealizedSet& realized, Code code, int k, std::uint64_t seed) {
  const ComponentSet& set = realized.base();
  if (k < 1) throw std::invalid_argument("ensemble size k must be >= 1");
  if (code < 0 || code > set.full_scale()) {
    throw std::invalid_argument("code " + std::to_string(code) + " out of range");
  }
  const MicrostateIndex index(set);
  const std::optional<std::uint64_t> count = index.count(code);
  if (!count) throw ResourceLimit("microstate count of code " + std::to_string(code) +
                                  " exceeds 64 bits; cannot sample uniformly");
  if (*count == 0) throw_no_assembly(set, code);

  double sum = 0.0;
  for (int j = 0; j < k; ++j) {
    const std::uint64_t rank =
        rng::uniform_below(*count, seed, rng::Stream::sampling, static_cast<std::uint64_t>(j));
    const Assembly a = index.nth(code, rank);
    sum += sum_over(realized.actual(), a.members);
  }
  return sum / static_cast<double>(k);
}

}  // namespace redunsense
