#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace redunsense {

using Weight = std::int64_t;
using Code = std::int64_t;
using IndexList = std::vector<std::size_t>;

/// COS: binary-weighted, one assembly per code.
/// CRS: r identical binary replicas; an assembly stays inside one replica.
/// RES: two entangled binary sub-arrays sharing the code space.
enum class Architecture { cos, crs, res, custom };

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view name);

inline constexpr int kMaxResolutionBits = 24;
inline constexpr int kMaxReplicas = 8;
/// Upper bound on the nominal unit total of any set (keeps code tables addressable).
inline constexpr Weight kMaxUnitTotal = Weight{1} << 31;

/// Nominal component inventory. Immutable after construction.
class ComponentSet {
 public:
  /// Validates the invariants and throws std::invalid_argument on violation.
  /// resolution_bits <= 0 means "derive from the full scale".
  ComponentSet(std::string id, Architecture arch, std::vector<Weight> weights,
               std::vector<IndexList> groups = {}, int resolution_bits = 0);

  const std::string& id() const { return id_; }
  Architecture arch() const { return arch_; }
  std::span<const Weight> weights() const { return weights_; }
  Weight weight(std::size_t i) const { return weights_[i]; }
  const std::vector<IndexList>& groups() const { return groups_; }
  int resolution_bits() const { return resolution_bits_; }
  std::size_t size() const { return weights_.size(); }

  /// Sum of all nominal weights, i.e. the unit-component resource count.
  Weight unit_total() const { return unit_total_; }

  /// Largest code the set is operated over. Equal to unit_total() except for
  /// CRS, where an assembly is confined to one replica.
  Code full_scale() const { return full_scale_; }

  /// Index lists an assembly may draw from: one per replica for CRS, a single
  /// list of every component otherwise. Domains are ascending and, for CRS,
  /// ordered so that every index of domain d is below every index of d+1.
  const std::vector<IndexList>& domains() const { return domains_; }

  friend bool operator==(const ComponentSet&, const ComponentSet&) = default;

 private:
  std::string id_;
  Architecture arch_;
  std::vector<Weight> weights_;
  std::vector<IndexList> groups_;
  int resolution_bits_ = 0;
  Weight unit_total_ = 0;
  Code full_scale_ = 0;
  std::vector<IndexList> domains_;
};

/// Binary-weighted set {1, 2, ..., 2^(N-1)}.
ComponentSet gen_binary(int bits);

/// Two binary sub-arrays: A = binary(N-1), B = binary(N-1) plus one extra unit.
/// Uses the same 2^N - 1 unit components as gen_binary(N).
ComponentSet gen_dual_binary(int bits);

/// r replicas of gen_binary(N).
ComponentSet gen_replicated(int bits, int replicas);

/// Parse a component-set document. Throws SchemaError naming the bad field.
ComponentSet component_set_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ComponentSet& set);

/// Load a component-set file. Without an "arch" key the set is CUSTOM.
ComponentSet load_custom(const std::filesystem::path& path);

struct MismatchModel {
  enum class Distribution { gaussian };

  double sigma_unit = 0.0;
  Distribution distribution = Distribution::gaussian;
};

/// One Monte Carlo world: nominal set plus its perturbed component values.
class RealizedSet {
 public:
  /// Throws DegenerateRealization if any value is nonpositive and
  /// std::invalid_argument on a length mismatch.
  RealizedSet(ComponentSet base, std::vector<double> actual, std::uint64_t seed);

  const ComponentSet& base() const { return base_; }
  std::span<const double> actual() const { return actual_; }
  double actual(std::size_t i) const { return actual_[i]; }
  std::uint64_t seed() const { return seed_; }

  /// Sum of actual values accumulated in index order.
  double total() const { return total_; }

 private:
  ComponentSet base_;
  std::vector<double> actual_;
  std::uint64_t seed_;
  double total_;
};

/// actual[i] = weights[i] + sigma_unit * sqrt(weights[i]) * z_i with z_i a
/// standard normal keyed on (seed, i).
RealizedSet realize(const ComponentSet& set, const MismatchModel& model, std::uint64_t seed);

/// Sum values[i] over members in the order given.
double sum_over(std::span<const double> values, std::span<const std::size_t> members);

}  // namespace redunsense
