#include "redunsense/components.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "redunsense/errors.hpp"
#include "redunsense/rng.hpp"

namespace redunsense {

namespace {

void require_bits(int bits, int lo, const char* what) {
  if (bits < lo || bits > kMaxResolutionBits) {
    throw std::invalid_argument(std::string(what) + ": resolution must be in [" +
                                std::to_string(lo) + ", " +
                                std::to_string(kMaxResolutionBits) + "], got " +
                                std::to_string(bits));
  }
}

std::vector<Weight> binary_weights(int bits) {
  std::vector<Weight> w(static_cast<std::size_t>(bits));
  for (int i = 0; i < bits; ++i) w[static_cast<std::size_t>(i)] = Weight{1} << i;
  return w;
}

IndexList iota_list(std::size_t first, std::size_t count) {
  IndexList out(count);
  std::iota(out.begin(), out.end(), first);
  return out;
}

}  // namespace

std::string_view to_string(Architecture arch) {
  switch (arch) {
    case Architecture::cos: return "cos";
    case Architecture::crs: return "crs";
    case Architecture::res: return "res";
    case Architecture::custom: return "custom";
  }
  return "custom";
}

Architecture parse_architecture(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cos") return Architecture::cos;
  if (lower == "crs") return Architecture::crs;
  if (lower == "res") return Architecture::res;
  if (lower == "custom") return Architecture::custom;
  throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

ComponentSet::ComponentSet(std::string id, Architecture arch, std::vector<Weight> weights,
                           std::vector<IndexList> groups, int resolution_bits)
    : id_(std::move(id)), arch_(arch), weights_(std::move(weights)), groups_(std::move(groups)) {
  if (weights_.empty()) throw std::invalid_argument("component set must not be empty");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] < 1) {
      throw std::invalid_argument("weights[" + std::to_string(i) + "] must be >= 1");
    }
    unit_total_ += weights_[i];
    if (unit_total_ > kMaxUnitTotal) {
      throw std::invalid_argument("sum of weights exceeds " + std::to_string(kMaxUnitTotal));
    }
  }

  if (!groups_.empty()) {
    std::vector<int> seen(weights_.size(), 0);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      if (groups_[g].empty()) {
        throw std::invalid_argument("groups[" + std::to_string(g) + "] is empty");
      }
      for (std::size_t idx : groups_[g]) {
        if (idx >= weights_.size()) {
          throw std::invalid_argument("groups[" + std::to_string(g) + "]: index " +
                                      std::to_string(idx) + " out of range");
        }
        if (seen[idx]++ != 0) {
          throw std::invalid_argument("groups: index " + std::to_string(idx) +
                                      " appears more than once");
        }
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (seen[i] == 0) {
        throw std::invalid_argument("groups: index " + std::to_string(i) +
                                    " is not covered by any group");
      }
    }
  }

  if (arch_ == Architecture::crs) {
    if (groups_.empty()) throw std::invalid_argument("CRS set requires replica groups");
    domains_ = groups_;
    for (auto& d : domains_) std::sort(d.begin(), d.end());
    std::sort(domains_.begin(), domains_.end());
    for (std::size_t d = 0; d < domains_.size(); ++d) {
      const IndexList& dom = domains_[d];
      if (dom.back() - dom.front() + 1 != dom.size() ||
          (d > 0 && dom.front() != domains_[d - 1].back() + 1)) {
        throw std::invalid_argument("CRS replica groups must be contiguous index ranges");
      }
      Weight s = 0;
      for (std::size_t idx : dom) s += weights_[idx];
      full_scale_ = std::max(full_scale_, s);
    }
  } else {
    domains_.push_back(iota_list(0, weights_.size()));
    full_scale_ = unit_total_;
  }

  resolution_bits_ = resolution_bits > 0
                         ? resolution_bits
                         : static_cast<int>(std::bit_width(static_cast<std::uint64_t>(full_scale_)));
}

ComponentSet gen_binary(int bits) {
  require_bits(bits, 1, "gen_binary");
  return ComponentSet("cos_n" + std::to_string(bits), Architecture::cos, binary_weights(bits), {},
                      bits);
}

ComponentSet gen_dual_binary(int bits) {
  require_bits(bits, 2, "gen_dual_binary");
  std::vector<Weight> a = binary_weights(bits - 1);
  std::vector<Weight> b = binary_weights(bits - 1);
  b.insert(b.begin(), 1);  // B = {1, 1, 2, ..., 2^(N-2)}
  std::vector<Weight> weights = a;
  weights.insert(weights.end(), b.begin(), b.end());
  std::vector<IndexList> groups{iota_list(0, a.size()), iota_list(a.size(), b.size())};
  return ComponentSet("res_n" + std::to_string(bits), Architecture::res, std::move(weights),
                      std::move(groups), bits);
}

ComponentSet gen_replicated(int bits, int replicas) {
  require_bits(bits, 1, "gen_replicated");
  if (replicas < 2 || replicas > kMaxReplicas) {
    throw std::invalid_argument("gen_replicated: replicas must be in [2, " +
                                std::to_string(kMaxReplicas) + "], got " +
                                std::to_string(replicas));
  }
  std::vector<Weight> one = binary_weights(bits);
  std::vector<Weight> weights;
  std::vector<IndexList> groups;
  for (int r = 0; r < replicas; ++r) {
    groups.push_back(iota_list(weights.size(), one.size()));
    weights.insert(weights.end(), one.begin(), one.end());
  }
  return ComponentSet("crs_n" + std::to_string(bits) + "_r" + std::to_string(replicas),
                      Architecture::crs, std::move(weights), std::move(groups), bits);
}

ComponentSet component_set_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("component set: expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "id" && key != "weights" && key != "groups" && key != "arch" &&
        key != "resolution_bits") {
      throw SchemaError("component set: unknown key '" + key + "'");
    }
  }
  if (!doc.contains("id") || !doc["id"].is_string()) {
    throw SchemaError("id: required string field");
  }
  if (!doc.contains("weights") || !doc["weights"].is_array() || doc["weights"].empty()) {
    throw SchemaError("weights: required non-empty array of positive integers");
  }

  std::vector<Weight> weights;
  const auto& jw = doc["weights"];
  for (std::size_t i = 0; i < jw.size(); ++i) {
    const auto& v = jw[i];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
      throw SchemaError("weights[" + std::to_string(i) + "]: must be a positive integer");
    }
    weights.push_back(v.get<Weight>());
  }

  std::vector<IndexList> groups;
  if (doc.contains("groups")) {
    const auto& jg = doc["groups"];
    if (!jg.is_array()) throw SchemaError("groups: expected an array of index arrays");
    std::vector<int> seen(weights.size(), 0);
    for (std::size_t g = 0; g < jg.size(); ++g) {
      if (!jg[g].is_array() || jg[g].empty()) {
        throw SchemaError("groups[" + std::to_string(g) + "]: expected a non-empty index array");
      }
      IndexList group;
      for (std::size_t k = 0; k < jg[g].size(); ++k) {
        const auto& v = jg[g][k];
        const std::string where = "groups[" + std::to_string(g) + "][" + std::to_string(k) + "]";
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
            v.get<std::uint64_t>() >= weights.size()) {
          throw SchemaError(where + ": index out of range");
        }
        const auto idx = v.get<std::size_t>();
        if (seen[idx]++ != 0) {
          throw SchemaError(where + ": index " + std::to_string(idx) +
                            " overlaps another group");
        }
        group.push_back(idx);
      }
      groups.push_back(std::move(group));
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (seen[i] == 0) {
        throw SchemaError("groups: index " + std::to_string(i) + " is not in any group");
      }
    }
  }

  Architecture arch = Architecture::custom;
  if (doc.contains("arch")) {
    if (!doc["arch"].is_string()) throw SchemaError("arch: expected a string");
    try {
      arch = parse_architecture(doc["arch"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string("arch: ") + e.what());
    }
  }
  int bits = 0;
  if (doc.contains("resolution_bits")) {
    if (!doc["resolution_bits"].is_number_integer()) {
      throw SchemaError("resolution_bits: expected an integer");
    }
    bits = doc["resolution_bits"].get<int>();
  }

  const auto id = doc["id"].get<std::string>();
  if (arch != Architecture::custom) {
    // Generated architectures must match their generator exactly.
    try {
      ComponentSet expected = arch == Architecture::cos   ? gen_binary(bits)
                              : arch == Architecture::res ? gen_dual_binary(bits)
                                                          : gen_replicated(bits, static_cast<int>(groups.size()));
      if (std::vector<Weight>(expected.weights().begin(), expected.weights().end()) != weights ||
          expected.groups() != groups) {
        throw SchemaError("arch: weights/groups do not match the " +
                          std::string(to_string(arch)) + " generator for resolution_bits=" +
                          std::to_string(bits));
      }
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string("resolution_bits: ") + e.what());
    }
  }

  try {
    return ComponentSet(id, arch, std::move(weights), std::move(groups), bits);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

nlohmann::json to_json(const ComponentSet& set) {
  nlohmann::json doc;
  doc["id"] = set.id();
  doc["arch"] = std::string(to_string(set.arch()));
  doc["resolution_bits"] = set.resolution_bits();
  doc["weights"] = std::vector<Weight>(set.weights().begin(), set.weights().end());
  if (!set.groups().empty()) doc["groups"] = set.groups();
  return doc;
}

ComponentSet load_custom(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open component set file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": JSON parse error: " + e.what());
  }
  return component_set_from_json(doc);
}

RealizedSet::RealizedSet(ComponentSet base, std::vector<double> actual, std::uint64_t seed)
    : base_(std::move(base)), actual_(std::move(actual)), seed_(seed), total_(0.0) {
  if (actual_.size() != base_.size()) {
    throw std::invalid_argument("realized values must match the component count");
  }
  for (std::size_t i = 0; i < actual_.size(); ++i) {
    if (!(actual_[i] > 0.0)) {
      std::ostringstream msg;
      msg << "component " << i << " realized to nonpositive value " << actual_[i]
          << " (seed " << seed_ << ")";
      throw DegenerateRealization(msg.str());
    }
    total_ += actual_[i];
  }
}

RealizedSet realize(const ComponentSet& set, const MismatchModel& model, std::uint64_t seed) {
  if (!(model.sigma_unit >= 0.0) || !std::isfinite(model.sigma_unit)) {
    throw std::invalid_argument("sigma_unit must be a finite nonnegative number");
  }
  std::vector<double> actual(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto w = static_cast<double>(set.weight(i));
    if (model.sigma_unit == 0.0) {
      actual[i] = w;
    } else {
      const double z = rng::standard_normal(seed, rng::Stream::mismatch, i);
      actual[i] = w + model.sigma_unit * std::sqrt(w) * z;
    }
  }
  return RealizedSet(set, std::move(actual), seed);
}

double sum_over(std::span<const double> values, std::span<const std::size_t> members) {
  double s = 0.0;
  for (std::size_t idx : members) s += values[idx];
  return s;
}

}  // namespace redunsense
