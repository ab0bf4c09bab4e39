#include "redunsense/microstates.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "redunsense/errors.hpp"

namespace redunsense {

namespace {

__extension__ using u128 = unsigned __int128;

void require_code(const ComponentSet& set, Code code) {
  if (code < 0 || code > set.full_scale()) {
    throw std::invalid_argument("code " + std::to_string(code) + " outside [0, " +
                                std::to_string(set.full_scale()) + "]");
  }
}

void require_memory(std::size_t bytes, std::size_t limit, const std::string& what) {
  if (bytes > limit) {
    throw ResourceLimit(what + " needs " + std::to_string(bytes) + " bytes, limit is " +
                        std::to_string(limit));
  }
}

BigCount to_big(std::uint64_t v) { return BigCount(v); }
BigCount to_big(u128 v) {
  BigCount hi(static_cast<std::uint64_t>(v >> 64));
  return (hi << 64) + BigCount(static_cast<std::uint64_t>(v));
}
BigCount to_big(const BigCount& v) { return v; }

// Subset-sum counts over one domain for sums 0..max_sum.
template <class Int>
std::vector<Int> domain_counts(const ComponentSet& set, const IndexList& domain, Code max_sum) {
  std::vector<Int> counts(static_cast<std::size_t>(max_sum) + 1, Int(0));
  counts[0] = Int(1);
  Weight reach = 0;
  for (std::size_t idx : domain) {
    const Weight w = set.weight(idx);
    reach = std::min<Weight>(reach + w, max_sum);
    for (Weight s = reach; s >= w; --s) {
      counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - w)];
    }
  }
  return counts;
}

// Dispatch on the widest count a domain can produce (at most 2^size).
template <class Fn>
void with_count_type(std::size_t domain_size, Fn&& fn) {
  if (domain_size <= 63) {
    fn(std::uint64_t{});
  } else if (domain_size <= 127) {
    fn(u128{});
  } else {
    fn(BigCount{});
  }
}

std::size_t count_width(std::size_t domain_size) {
  if (domain_size <= 63) return sizeof(std::uint64_t);
  if (domain_size <= 127) return sizeof(u128);
  return sizeof(BigCount) + (domain_size + 7) / 8;
}

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return (a > kSaturated - b) ? kSaturated : a + b;
}

}  // namespace

Assembly make_assembly(const ComponentSet& set, IndexList members) {
  std::sort(members.begin(), members.end());
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw std::invalid_argument("assembly members must be unique");
  }
  Assembly a;
  for (std::size_t idx : members) {
    if (idx >= set.size()) {
      throw std::invalid_argument("assembly member " + std::to_string(idx) + " out of range");
    }
    a.nominal_sum += set.weight(idx);
  }
  a.members = std::move(members);
  return a;
}

BigCount count_microstates(const ComponentSet& set, Code code) {
  require_code(set, code);
  if (code == 0) return BigCount(1);
  BigCount total = 0;
  for (const IndexList& domain : set.domains()) {
    require_memory((static_cast<std::size_t>(code) + 1) * count_width(domain.size()),
                   kDefaultMemoryLimit, "count_microstates");
    with_count_type(domain.size(), [&](auto tag) {
      using Int = decltype(tag);
      total += to_big(domain_counts<Int>(set, domain, code)[static_cast<std::size_t>(code)]);
    });
  }
  return total;
}

Enumeration enumerate_microstates(const ComponentSet& set, Code code, std::size_t limit) {
  require_code(set, code);
  if (limit < 1) throw std::invalid_argument("enumeration limit must be >= 1");
  const MicrostateIndex index(set);
  Enumeration out;
  index.for_each(code, [&](std::span<const std::size_t> members) {
    if (out.assemblies.size() == limit) {
      out.truncated = true;
      return false;
    }
    out.assemblies.push_back(Assembly{IndexList(members.begin(), members.end()), code});
    return true;
  });
  return out;
}

std::optional<Code> first_unrepresentable(const ComponentSet& set) {
  const auto fs = static_cast<std::size_t>(set.full_scale());
  std::vector<char> any(fs + 1, 0);
  for (const IndexList& domain : set.domains()) {
    std::vector<char> reach(fs + 1, 0);
    reach[0] = 1;
    for (std::size_t idx : domain) {
      const auto w = static_cast<std::size_t>(set.weight(idx));
      for (std::size_t s = fs; s >= w; --s) reach[s] |= reach[s - w];
    }
    for (std::size_t s = 0; s <= fs; ++s) any[s] |= reach[s];
  }
  const auto gap = std::find(any.begin(), any.end(), char{0});
  if (gap == any.end()) return std::nullopt;
  return static_cast<Code>(gap - any.begin());
}

bool is_complete(const ComponentSet& set) { return !first_unrepresentable(set).has_value(); }

CapacityProfile capacity_profile(const ComponentSet& set, std::size_t memory_limit) {
  const Code fs = set.full_scale();
  const auto slots = static_cast<std::size_t>(fs) + 1;
  std::size_t widest = 0;
  for (const IndexList& d : set.domains()) widest = std::max(widest, count_width(d.size()));
  require_memory(slots * (widest + sizeof(BigCount)), memory_limit, "capacity_profile");

  CapacityProfile profile;
  profile.counts.assign(slots, BigCount(0));
  for (const IndexList& domain : set.domains()) {
    with_count_type(domain.size(), [&](auto tag) {
      using Int = decltype(tag);
      const std::vector<Int> counts = domain_counts<Int>(set, domain, fs);
      for (std::size_t s = 0; s < slots; ++s) {
        if (counts[s] != Int(0)) profile.counts[s] += to_big(counts[s]);
      }
    });
  }
  profile.counts[0] = 1;  // the empty assembly is shared by all replicas
  return profile;
}

void write_capacity_csv(const CapacityProfile& profile, std::ostream& out) {
  out << "code,count\n";
  for (std::size_t x = 0; x < profile.counts.size(); ++x) {
    out << x << ',' << profile.counts[x] << '\n';
  }
}

MicrostateIndex::MicrostateIndex(const ComponentSet& set, std::size_t memory_limit) : set_(set) {
  std::size_t bytes = 0;
  for (const IndexList& domain : set_.domains()) {
    Weight total = 0;
    for (std::size_t idx : domain) total += set_.weight(idx);
    bytes += (domain.size() + 1) * (static_cast<std::size_t>(total) + 1) * sizeof(std::uint64_t);
  }
  require_memory(bytes, memory_limit, "microstate index");

  for (const IndexList& domain : set_.domains()) {
    DomainTable t;
    t.indices = domain;
    for (std::size_t idx : domain) t.weights.push_back(set_.weight(idx));
    for (Weight w : t.weights) t.total += w;
    const auto width = static_cast<std::size_t>(t.total) + 1;
    const std::size_t m = domain.size();
    t.suffix.assign((m + 1) * width, 0);
    t.suffix[m * width] = 1;
    for (std::size_t j = m; j-- > 0;) {
      const auto w = static_cast<std::size_t>(t.weights[j]);
      const std::uint64_t* below = &t.suffix[(j + 1) * width];
      std::uint64_t* row = &t.suffix[j * width];
      for (std::size_t s = 0; s < width; ++s) {
        row[s] = s >= w ? saturating_add(below[s], below[s - w]) : below[s];
      }
    }
    domains_.push_back(std::move(t));
  }
}

bool MicrostateIndex::representable(Code code) const {
  if (code < 0 || code > set_.full_scale()) return false;
  return std::any_of(domains_.begin(), domains_.end(),
                     [code](const DomainTable& t) { return t.at(0, code) > 0; });
}

std::optional<std::uint64_t> MicrostateIndex::count(Code code) const {
  if (code == 0) return 1;
  std::uint64_t total = 0;
  for (const DomainTable& t : domains_) {
    const std::uint64_t c = t.at(0, code);
    if (c == kSaturated) return std::nullopt;
    total = saturating_add(total, c);
    if (total == kSaturated) return std::nullopt;
  }
  return total;
}

std::optional<Assembly> MicrostateIndex::first_in_domain(std::size_t domain, Code code) const {
  std::optional<Assembly> found;
  for_each_in_domain(domain, code, [&](std::span<const std::size_t> members) {
    found = Assembly{IndexList(members.begin(), members.end()), code};
    return false;
  });
  return found;
}

std::optional<Assembly> MicrostateIndex::first(Code code) const {
  std::optional<Assembly> found;
  for_each(code, [&](std::span<const std::size_t> members) {
    found = Assembly{IndexList(members.begin(), members.end()), code};
    return false;
  });
  return found;
}

Assembly MicrostateIndex::nth(Code code, std::uint64_t rank) const {
  if (code == 0) {
    if (rank != 0) throw std::out_of_range("microstate rank out of range");
    return Assembly{};
  }
  for (const DomainTable& t : domains_) {
    const std::uint64_t c = t.at(0, code);
    if (rank >= c) {
      rank -= c;
      continue;
    }
    // Subsets of positions j.. are ordered by their first chosen position.
    Assembly out;
    out.nominal_sum = code;
    Weight remaining = code;
    std::size_t j = 0;
    while (remaining > 0) {
      for (std::size_t k = j;; ++k) {
        const Weight w = t.weights[k];
        const std::uint64_t below = w <= remaining ? t.at(k + 1, remaining - w) : 0;
        if (rank < below) {
          out.members.push_back(t.indices[k]);
          remaining -= w;
          j = k + 1;
          break;
        }
        rank -= below;
      }
    }
    return out;
  }
  throw std::out_of_range("microstate rank out of range");
}

}  // namespace redunsense
