#include "redunsense/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "redunsense/errors.hpp"
#include "redunsense/stats.hpp"
#include "redunsense/text_io.hpp"

namespace redunsense {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      schema_fail(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

SelectionStrategy strategy_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_strategy(j.get<std::string>());
    if (!j.is_object()) schema_fail(where, "expected a strategy name or object");
    reject_unknown(j, where, {"kind", "params"});
    if (!j.contains("kind") || !j["kind"].is_string()) schema_fail(where + ".kind", "required string");
    SelectionStrategy s{parse_strategy_kind(j["kind"].get<std::string>()), {}};
    if (j.contains("params")) {
      if (!j["params"].is_object()) schema_fail(where + ".params", "expected an object");
      for (const auto& [key, value] : j["params"].items()) {
        if (!value.is_number_integer()) schema_fail(where + ".params." + key, "expected an integer");
        s.params[key] = value.get<std::int64_t>();
      }
    }
    return s;
  } catch (const std::invalid_argument& e) {
    schema_fail(where, e.what());
  }
}

std::vector<SelectionStrategy> strategies_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) schema_fail(where, "expected an array");
  std::vector<SelectionStrategy> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(strategy_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ArchitectureSpec arch_from_json(const json& j, const std::string& where,
                                const std::filesystem::path& base_dir) {
  ArchitectureSpec spec;
  try {
    if (j.is_string()) {
      spec.arch = parse_architecture(j.get<std::string>());
    } else if (j.is_object()) {
      reject_unknown(j, where, {"arch", "replicas", "path", "strategies"});
      if (!j.contains("arch") || !j["arch"].is_string()) schema_fail(where + ".arch", "required string");
      spec.arch = parse_architecture(j["arch"].get<std::string>());
      if (j.contains("replicas")) {
        if (!j["replicas"].is_number_integer()) schema_fail(where + ".replicas", "expected an integer");
        spec.replicas = j["replicas"].get<int>();
      }
      if (j.contains("path")) {
        if (!j["path"].is_string()) schema_fail(where + ".path", "expected a string");
        spec.path = j["path"].get<std::string>();
        if (spec.path.is_relative() && !base_dir.empty()) spec.path = base_dir / spec.path;
      }
      if (j.contains("strategies")) {
        spec.strategies = strategies_from_json(j["strategies"], where + ".strategies");
      }
    } else {
      schema_fail(where, "expected an architecture name or object");
    }
  } catch (const std::invalid_argument& e) {
    schema_fail(where, e.what());
  }
  if (spec.arch == Architecture::custom && spec.path.empty()) {
    schema_fail(where + ".path", "custom architecture requires a path");
  }
  return spec;
}

// Component sets a spec produces for the sweep: one per N, or the custom set once.
std::vector<ComponentSet> sets_for(const ArchitectureSpec& spec, const std::vector<int>& n_list) {
  if (spec.arch == Architecture::custom) return {load_custom(spec.path)};
  std::vector<ComponentSet> out;
  for (int n : n_list) {
    switch (spec.arch) {
      case Architecture::cos: out.push_back(gen_binary(n)); break;
      case Architecture::res: out.push_back(gen_dual_binary(n)); break;
      case Architecture::crs: out.push_back(gen_replicated(n, spec.replicas)); break;
      case Architecture::custom: break;
    }
  }
  return out;
}

const std::vector<SelectionStrategy>& strategies_of(const ArchitectureSpec& spec,
                                                   const ExperimentConfig& config) {
  return spec.strategies.empty() ? config.strategies : spec.strategies;
}

auto row_key(const ResultRow& r) { return std::tie(r.arch, r.strategy, r.n, r.sigma, r.trial); }

std::string csv_field(const std::string& s) {
  std::string out = s;
  std::replace(out.begin(), out.end(), ',', '_');
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) schema_fail("config", "expected a JSON object");
  reject_unknown(doc, "", {"architectures", "strategies", "sigma_list", "n_list", "trials",
                           "base_seed", "mode"});
  for (const char* key : {"architectures", "sigma_list", "n_list", "trials", "base_seed"}) {
    if (!doc.contains(key)) schema_fail(key, "required field missing");
  }

  ExperimentConfig c;
  const json& archs = doc["architectures"];
  if (!archs.is_array() || archs.empty()) schema_fail("architectures", "expected a non-empty array");
  for (std::size_t i = 0; i < archs.size(); ++i) {
    c.architectures.push_back(
        arch_from_json(archs[i], "architectures[" + std::to_string(i) + "]", base_dir));
  }
  if (doc.contains("strategies")) c.strategies = strategies_from_json(doc["strategies"], "strategies");

  const json& sig = doc["sigma_list"];
  if (!sig.is_array() || sig.empty()) schema_fail("sigma_list", "expected a non-empty array");
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (!sig[i].is_number()) schema_fail("sigma_list[" + std::to_string(i) + "]", "expected a number");
    c.sigma_list.push_back(sig[i].get<double>());
  }
  const json& ns = doc["n_list"];
  if (!ns.is_array() || ns.empty()) schema_fail("n_list", "expected a non-empty array");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!ns[i].is_number_integer()) schema_fail("n_list[" + std::to_string(i) + "]", "expected an integer");
    c.n_list.push_back(ns[i].get<int>());
  }
  if (!doc["trials"].is_number_integer()) schema_fail("trials", "expected an integer");
  c.trials = doc["trials"].get<int>();
  if (!doc["base_seed"].is_number_unsigned()) schema_fail("base_seed", "expected a nonnegative integer");
  c.base_seed = doc["base_seed"].get<std::uint64_t>();
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) schema_fail("mode", "expected a string");
    try {
      c.mode = parse_error_mode(doc["mode"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      schema_fail("mode", e.what());
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": JSON parse error: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

void validate(const ExperimentConfig& config) {
  if (config.architectures.empty()) schema_fail("architectures", "must not be empty");
  if (config.trials < 1) schema_fail("trials", "must be >= 1");
  if (config.sigma_list.empty()) schema_fail("sigma_list", "must not be empty");
  if (config.n_list.empty()) schema_fail("n_list", "must not be empty");
  for (std::size_t i = 0; i < config.sigma_list.size(); ++i) {
    const double s = config.sigma_list[i];
    if (!std::isfinite(s) || s < 0.0) {
      schema_fail("sigma_list[" + std::to_string(i) + "]", "must be a finite value >= 0");
    }
  }
  const std::int64_t units = std::int64_t{config.trials} *
                             static_cast<std::int64_t>(config.sigma_list.size()) *
                             static_cast<std::int64_t>(config.n_list.size());
  if (units > kMaxSweepUnits) {
    schema_fail("trials", "trials * |sigma_list| * |n_list| = " + std::to_string(units) +
                              " exceeds " + std::to_string(kMaxSweepUnits));
  }

  for (std::size_t a = 0; a < config.architectures.size(); ++a) {
    const ArchitectureSpec& spec = config.architectures[a];
    const std::string where = "architectures[" + std::to_string(a) + "]";
    const auto& strategies = strategies_of(spec, config);
    if (strategies.empty()) schema_fail(where + ".strategies", "no strategies given");
    std::vector<ComponentSet> sets;
    try {
      sets = sets_for(spec, config.n_list);
    } catch (const std::invalid_argument& e) {
      schema_fail(where, e.what());
    } catch (const IoError& e) {
      schema_fail(where + ".path", e.what());
    } catch (const SchemaError& e) {
      schema_fail(where + ".path", e.what());
    }
    for (const ComponentSet& set : sets) {
      if (!is_complete(set)) schema_fail(where, "set '" + set.id() + "' is incomplete");
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        try {
          check_admissible(set, strategies[s]);
        } catch (const std::exception& e) {
          schema_fail(where + ".strategies[" + std::to_string(s) + "]", e.what());
        }
      }
    }
  }
}

std::string arch_label(const ComponentSet& set) {
  switch (set.arch()) {
    case Architecture::cos: return "cos";
    case Architecture::res: return "res";
    case Architecture::crs: return "crs-r" + std::to_string(set.groups().size());
    case Architecture::custom: return csv_field("custom:" + set.id());
  }
  return "custom";
}

ResultTable make_table(std::vector<ResultRow> rows, std::uint64_t reseeds) {
  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
  ResultTable table;
  table.reseeds = reseeds;

  for (std::size_t lo = 0; lo < rows.size();) {
    std::size_t hi = lo;
    std::vector<double> values;
    while (hi < rows.size() && rows[hi].arch == rows[lo].arch &&
           rows[hi].strategy == rows[lo].strategy && rows[hi].n == rows[lo].n &&
           rows[hi].sigma == rows[lo].sigma) {
      values.push_back(rows[hi].max_inl);
      ++hi;
    }
    Aggregate g;
    g.arch = rows[lo].arch;
    g.strategy = rows[lo].strategy;
    g.n = rows[lo].n;
    g.sigma = rows[lo].sigma;
    g.mean_max_inl = stats::mean(values);
    g.std_max_inl = stats::sample_std(values);
    g.p95_max_inl = stats::percentile(values, 0.95);
    table.aggregates.push_back(g);
    lo = hi;
  }

  for (Aggregate& g : table.aggregates) {
    g.improvement_ratio = std::numeric_limits<double>::quiet_NaN();
    for (const Aggregate& base : table.aggregates) {
      if (base.arch == "cos" && base.strategy == "canonical" && base.n == g.n &&
          base.sigma == g.sigma && g.mean_max_inl > 0.0) {
        g.improvement_ratio = base.mean_max_inl / g.mean_max_inl;
      }
    }
  }
  table.rows = std::move(rows);
  return table;
}

ResultTable merge_tables(const std::vector<ResultTable>& tables) {
  std::map<std::tuple<std::string, std::string, int, double, int>, ResultRow> unique;
  std::uint64_t reseeds = 0;
  for (const ResultTable& t : tables) {
    reseeds += t.reseeds;
    for (const ResultRow& r : t.rows) {
      const auto key = std::make_tuple(r.arch, r.strategy, r.n, r.sigma, r.trial);
      const auto [it, inserted] = unique.emplace(key, r);
      if (!inserted && !(it->second == r)) {
        throw std::invalid_argument("conflicting results for " + r.arch + "/" + r.strategy +
                                    " N=" + std::to_string(r.n) + " sigma=" +
                                    format_double(r.sigma) + " trial=" + std::to_string(r.trial));
      }
    }
  }
  std::vector<ResultRow> rows;
  for (auto& [_, r] : unique) rows.push_back(r);
  return make_table(std::move(rows), reseeds);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("REDUNSENSE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

ResultTable run_sweep(const ExperimentConfig& config, unsigned threads) {
  validate(config);

  struct Unit {
    const ComponentSet* set;
    const std::vector<SelectionStrategy>* strategies;
    std::string arch;
    double sigma;
    int trial;
  };

  std::vector<std::vector<ComponentSet>> sets;
  for (const ArchitectureSpec& spec : config.architectures) {
    sets.push_back(sets_for(spec, config.n_list));
  }
  std::vector<Unit> units;
  for (std::size_t a = 0; a < config.architectures.size(); ++a) {
    for (const ComponentSet& set : sets[a]) {
      for (double sigma : config.sigma_list) {
        for (int t = 0; t < config.trials; ++t) {
          units.push_back({&set, &strategies_of(config.architectures[a], config), arch_label(set),
                           sigma, t});
        }
      }
    }
  }

  std::vector<std::vector<ResultRow>> results(units.size());
  std::vector<std::uint64_t> reseeds(units.size(), 0);
  std::vector<std::exception_ptr> errors(units.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t u = next++; u < units.size(); u = next++) {
      const Unit& unit = units[u];
      try {
        const MismatchModel model{unit.sigma};
        std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(unit.trial);
        std::optional<RealizedSet> realized;
        for (int attempt = 0; !realized; ++attempt) {
          try {
            realized.emplace(realize(*unit.set, model, seed));
          } catch (const DegenerateRealization&) {
            if (attempt >= 63) throw;
            ++reseeds[u];
            seed += kReseedOffset;
          }
        }
        for (const SelectionStrategy& strategy : *unit.strategies) {
          const AccuracyReport rep = summary(transfer_function(*realized, strategy), config.mode);
          results[u].push_back(ResultRow{unit.arch, strategy.label(), unit.set->resolution_bits(),
                                         unit.sigma, unit.trial, rep.max_inl, rep.rms_inl,
                                         rep.max_dnl});
        }
      } catch (...) {
        errors[u] = std::current_exception();
      }
    }
  };

  const unsigned n_threads =
      std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(1, units.size())));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<ResultRow> rows;
  std::uint64_t total_reseeds = 0;
  for (std::size_t u = 0; u < units.size(); ++u) {
    rows.insert(rows.end(), results[u].begin(), results[u].end());
    total_reseeds += reseeds[u];
  }
  return make_table(std::move(rows), total_reseeds);
}

void write_rows_csv(const ResultTable& table, std::ostream& out) {
  if (table.reseeds > 0) out << "# reseeds=" << table.reseeds << '\n';
  out << "arch,strategy,N,sigma,trial,max_inl,rms_inl,max_dnl\n";
  for (const ResultRow& r : table.rows) {
    out << r.arch << ',' << r.strategy << ',' << r.n << ',' << format_double(r.sigma) << ','
        << r.trial << ',' << format_double(r.max_inl) << ',' << format_double(r.rms_inl) << ','
        << format_double(r.max_dnl) << '\n';
  }
}

void write_aggregates_csv(const ResultTable& table, std::ostream& out) {
  out << "arch,strategy,N,sigma,mean_max_inl,std_max_inl,p95_max_inl,improvement_ratio\n";
  for (const Aggregate& g : table.aggregates) {
    out << g.arch << ',' << g.strategy << ',' << g.n << ',' << format_double(g.sigma) << ','
        << format_double(g.mean_max_inl) << ',' << format_double(g.std_max_inl) << ','
        << format_double(g.p95_max_inl) << ',' << format_double(g.improvement_ratio) << '\n';
  }
}

ResultTable rows_from_csv(std::istream& in) {
  std::string line;
  std::uint64_t reseeds = 0;
  bool header_seen = false;
  std::vector<ResultRow> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# reseeds=", 0) == 0) {
      reseeds = std::stoull(line.substr(10));
      continue;
    }
    if (line[0] == '#') continue;
    if (!header_seen) {
      if (line != "arch,strategy,N,sigma,trial,max_inl,rms_inl,max_dnl") {
        throw SchemaError("line " + std::to_string(line_no) + ": unexpected header");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 8) throw SchemaError("line " + std::to_string(line_no) + ": expected 8 fields");
    try {
      rows.push_back(ResultRow{f[0], f[1], std::stoi(f[2]), parse_double(f[3]), std::stoi(f[4]),
                               parse_double(f[5]), parse_double(f[6]), parse_double(f[7])});
    } catch (const std::exception& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header_seen) throw SchemaError("rows CSV: missing header");
  return make_table(std::move(rows), reseeds);
}

json to_json(const ResultTable& table) {
  json doc;
  doc["reseeds"] = table.reseeds;
  doc["rows"] = json::array();
  for (const ResultRow& r : table.rows) {
    doc["rows"].push_back({{"arch", r.arch}, {"strategy", r.strategy}, {"N", r.n},
                           {"sigma", r.sigma}, {"trial", r.trial}, {"max_inl", r.max_inl},
                           {"rms_inl", r.rms_inl}, {"max_dnl", r.max_dnl}});
  }
  doc["aggregates"] = json::array();
  for (const Aggregate& g : table.aggregates) {
    doc["aggregates"].push_back({{"arch", g.arch}, {"strategy", g.strategy}, {"N", g.n},
                                 {"sigma", g.sigma}, {"mean_max_inl", g.mean_max_inl},
                                 {"std_max_inl", g.std_max_inl},
                                 {"p95_max_inl", g.p95_max_inl},
                                 {"improvement_ratio", number_or_null(g.improvement_ratio)}});
  }
  return doc;
}

ResultTable table_from_json(const json& doc) {
  try {
    std::vector<ResultRow> rows;
    for (const json& r : doc.at("rows")) {
      rows.push_back(ResultRow{r.at("arch").get<std::string>(), r.at("strategy").get<std::string>(),
                               r.at("N").get<int>(), r.at("sigma").get<double>(),
                               r.at("trial").get<int>(), r.at("max_inl").get<double>(),
                               r.at("rms_inl").get<double>(), r.at("max_dnl").get<double>()});
    }
    return make_table(std::move(rows), doc.value("reseeds", std::uint64_t{0}));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("result table: ") + e.what());
  }
}

void report(const ResultTable& table, ReportFormat format, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir.string() + "'");
  if (format == ReportFormat::json) {
    write_file_atomic(out_dir / "results.json", to_json(table).dump(2) + "\n");
    return;
  }
  std::ostringstream rows;
  write_rows_csv(table, rows);
  std::ostringstream aggs;
  write_aggregates_csv(table, aggs);
  write_file_atomic(out_dir / "rows.csv", rows.str());
  write_file_atomic(out_dir / "aggregates.csv", aggs.str());
}

}  // namespace redunsense
