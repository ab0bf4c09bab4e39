#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "redunsense/components.hpp"

namespace redunsense {

using BigCount = boost::multiprecision::cpp_int;

/// Default cap on memory a single counting or table build may allocate.
inline constexpr std::size_t kDefaultMemoryLimit = std::size_t{1} << 30;

/// One microstate: a set of component indices and its nominal code.
struct Assembly {
  IndexList members;  // strictly ascending
  Code nominal_sum = 0;

  friend bool operator==(const Assembly&, const Assembly&) = default;
};

/// Validates indices against the set and computes nominal_sum.
Assembly make_assembly(const ComponentSet& set, IndexList members);

struct Enumeration {
  std::vector<Assembly> assemblies;
  bool truncated = false;
};

struct CapacityProfile {
  std::vector<BigCount> counts;  // indexed by code 0..full_scale
};

/// Exact number of microstates of `code` (replica-confined for CRS).
BigCount count_microstates(const ComponentSet& set, Code code);

/// Microstates of `code` in lexicographic order of member indices, at most `limit`.
Enumeration enumerate_microstates(const ComponentSet& set, Code code, std::size_t limit);

/// True iff every code in [0, full_scale] has at least one microstate.
bool is_complete(const ComponentSet& set);

/// Smallest code without a microstate, if any.
std::optional<Code> first_unrepresentable(const ComponentSet& set);

/// Counts for every code from a single DP pass.
CapacityProfile capacity_profile(const ComponentSet& set,
                                 std::size_t memory_limit = kDefaultMemoryLimit);

/// `code,count` rows with a header line.
void write_capacity_csv(const CapacityProfile& profile, std::ostream& out);

/// Read-only per-set lookup structure backing lexicographic enumeration,
/// first-assembly queries and uniform microstate sampling.
///
/// Holds, per domain, suffix[j][s] = number of subsets of the domain's
/// components j.. that sum to s, saturated at UINT64_MAX.
class MicrostateIndex {
 public:
  explicit MicrostateIndex(const ComponentSet& set,
                           std::size_t memory_limit = kDefaultMemoryLimit);

  const ComponentSet& set() const { return set_; }

  bool representable(Code code) const;

  /// Number of distinct microstates; nullopt when a domain count saturates.
  std::optional<std::uint64_t> count(Code code) const;

  /// Lexicographically smallest microstate of `code`.
  std::optional<Assembly> first(Code code) const;

  /// Lexicographically smallest microstate of `code` inside one domain.
  std::optional<Assembly> first_in_domain(std::size_t domain, Code code) const;

  /// The rank-th microstate in lexicographic order (rank < count(code)).
  Assembly nth(Code code, std::uint64_t rank) const;

  /// Calls visit(members) for each microstate in lexicographic order until it
  /// returns false. `members` is only valid during the call.
  template <class Visitor>
  void for_each(Code code, Visitor&& visit) const;

  /// Same as for_each restricted to one domain.
  template <class Visitor>
  bool for_each_in_domain(std::size_t domain, Code code, Visitor&& visit) const;

 private:
  struct DomainTable {
    IndexList indices;
    std::vector<Weight> weights;
    Weight total = 0;
    std::vector<std::uint64_t> suffix;  // (indices.size() + 1) x (total + 1)

    std::uint64_t at(std::size_t j, Weight s) const {
      if (s < 0 || s > total) return 0;
      return suffix[j * static_cast<std::size_t>(total + 1) + static_cast<std::size_t>(s)];
    }
  };

  template <class Visitor>
  bool walk(const DomainTable& t, std::size_t j, Weight remaining, IndexList& path,
            Visitor& visit) const;

  ComponentSet set_;
  std::vector<DomainTable> domains_;
};

template <class Visitor>
bool MicrostateIndex::walk(const DomainTable& t, std::size_t j, Weight remaining,
                           IndexList& path, Visitor& visit) const {
  if (remaining == 0) return visit(std::span<const std::size_t>(path));
  for (std::size_t k = j; k < t.indices.size(); ++k) {
    const Weight w = t.weights[k];
    if (w > remaining || t.at(k + 1, remaining - w) == 0) continue;
    path.push_back(t.indices[k]);
    const bool keep_going = walk(t, k + 1, remaining - w, path, visit);
    path.pop_back();
    if (!keep_going) return false;
  }
  return true;
}

template <class Visitor>
bool MicrostateIndex::for_each_in_domain(std::size_t domain, Code code, Visitor&& visit) const {
  const DomainTable& t = domains_.at(domain);
  if (code < 0 || code > t.total || t.at(0, code) == 0) return true;
  IndexList path;
  return walk(t, 0, code, path, visit);
}

template <class Visitor>
void MicrostateIndex::for_each(Code code, Visitor&& visit) const {
  if (code == 0) {
    // Every domain shares the same empty assembly.
    IndexList empty;
    visit(std::span<const std::size_t>(empty));
    return;
  }
  for (std::size_t d = 0; d < domains_.size(); ++d) {
    if (!for_each_in_domain(d, code, visit)) return;
  }
}

}  // namespace redunsense
