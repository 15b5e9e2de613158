#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bdlle/datasets.hpp"
#include "bdlle/detectors.hpp"
#include "bdlle/diffusion.hpp"
#include "bdlle/errors.hpp"

namespace bdlle {

/// Malformed or inconsistent run configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

inline constexpr int kSchemaVersion = 1;

/// One benchmark column: a dataset and the scales its detectors use.
struct DatasetEntry {
  std::string id;
  DatasetSpec spec;
  std::optional<double> epsilon;  ///< ball detectors; unset picks the epsilon-range midpoint
  std::optional<Index> k;         ///< KNN detectors; unset picks select_K
  std::optional<DmParams> dm;     ///< embed by diffusion maps before detection

  bool operator==(const DatasetEntry&) const = default;
};

/// A complete benchmark run. Serialized as an INI document:
///
///     [run]
///     schema_version = 1
///     seed = 1
///     output = bench
///     detectors = bdlle,band,border,brim,cps,lever,spinver
///     regularizer = auto
///     s_factor = 0.01
///     threshold_frac = 0.5
///     grid_k = 40
///     grid_step = 0.05
///
///     [dataset:vcut]
///     name = vcut
///     n = 5056
///     epsilon = 1
///     k = 50
///
/// The regularizer is auto, theoretical, or a positive number. Dataset
/// sections also take sigma, nonuniform, gt_helpers, gt_radius and,
/// for the denoising pipeline, dm = true with dm_epsilon, dm_ell, dm_n_max.
/// Every dataset is sampled with the run seed; parse_config copies it into
/// each DatasetSpec.
struct RunConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 1;
  std::string output = "bench";
  std::vector<Algorithm> detectors = all_algorithms();
  RegularizerSpec regularizer{};
  double threshold_frac = 0.5;
  Index grid_k = 40;
  double grid_step = 0.05;
  std::vector<DatasetEntry> datasets;

  bool operator==(const RunConfig&) const = default;
};

namespace config_detail {

using boost::property_tree::ptree;

inline std::string format_real(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_number(const std::string& where, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError(where + ": cannot parse '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& where, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(where + ": expected true or false, got '" + text + "'");
}

inline std::string join(const std::vector<Algorithm>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
  return s;
}

inline std::vector<Algorithm> split_detectors(const std::string& where, const std::string& text) {
  std::vector<Algorithm> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    try {
      out.push_back(parse_algorithm(item.substr(b, e - b + 1)));
    } catch (const InvalidArgument& err) {
      throw ConfigError(where + ": " + err.what());
    }
  }
  return out;
}

inline std::string regularizer_text(const RegularizerSpec& r) {
  switch (r.mode) {
    case RegularizerSpec::Mode::kAuto: return "auto";
    case RegularizerSpec::Mode::kTheoretical: return "theoretical";
    case RegularizerSpec::Mode::kExplicit: return format_real(r.value);
  }
  return "auto";
}

/// Reads each key of a section through `take`, then rejects leftovers.
class Section {
 public:
  Section(std::string name, const ptree& tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> take(const std::string& key) {
    seen_.insert(key);
    const auto it = tree_.find(key);
    if (it == tree_.not_found()) return std::nullopt;
    return it->second.data();
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void finish() const {
    for (const auto& [key, value] : tree_)
      if (!seen_.count(key)) throw ConfigError("[" + name_ + "]: unknown key '" + key + "'");
  }

 private:
  std::string name_;
  const ptree& tree_;
  std::set<std::string> seen_;
};

}  // namespace config_detail

/// Checks every field; throws ConfigError naming the offending entry.
inline void validate(const RunConfig& c) {
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
  if (c.output.empty()) throw ConfigError("[run] output must not be empty");
  if (c.detectors.empty()) throw ConfigError("[run] detectors must name at least one detector");
  if (c.regularizer.mode == RegularizerSpec::Mode::kExplicit && !(c.regularizer.value > 0.0))
    throw ConfigError("[run] regularizer must be auto, theoretical, or a positive number");
  if (!(c.regularizer.s_factor > 0.0)) throw ConfigError("[run] s_factor must be > 0");
  if (!(c.threshold_frac > 0.0) || c.threshold_frac > 1.0) throw ConfigError("[run] threshold_frac must lie in (0, 1]");
  if (c.grid_k < 1) throw ConfigError("[run] grid_k must be >= 1");
  if (!(c.grid_step > 0.0)) throw ConfigError("[run] grid_step must be > 0");
  if (c.datasets.empty()) throw ConfigError("no [dataset:<id>] sections");
  std::set<std::string> ids;
  for (const auto& d : c.datasets) {
    const std::string s = "[dataset:" + d.id + "]";
    if (d.id.empty() || d.id.find_first_of("/\\ ") != std::string::npos) throw ConfigError(s + ": invalid id");
    if (!ids.insert(d.id).second) throw ConfigError(s + ": duplicate id");
    try {
      default_size(d.spec.name);
    } catch (const InvalidArgument& e) {
      throw ConfigError(s + ": " + e.what());
    }
    if (d.spec.n < 1) throw ConfigError(s + ": n must be >= 1");
    if (!(d.spec.sigma >= 0.0)) throw ConfigError(s + ": sigma must be >= 0");
    if (d.epsilon && !(*d.epsilon > 0.0)) throw ConfigError(s + ": epsilon must be > 0");
    if (d.k && *d.k < 1) throw ConfigError(s + ": k must be >= 1");
    if (d.dm) {
      if (!(d.dm->epsilon_dm > 0.0)) throw ConfigError(s + ": dm_epsilon must be > 0");
      if (d.dm->ell < 1) throw ConfigError(s + ": dm_ell must be >= 1");
    }
  }
}

inline std::string serialize(const RunConfig& c) {
  using config_detail::format_real;
  boost::property_tree::ptree root;
  auto& run = root.put_child("run", {});
  run.put("schema_version", c.schema_version);
  run.put("seed", c.seed);
  run.put("output", c.output);
  run.put("detectors", config_detail::join(c.detectors));
  run.put("regularizer", config_detail::regularizer_text(c.regularizer));
  run.put("s_factor", format_real(c.regularizer.s_factor));
  run.put("threshold_frac", format_real(c.threshold_frac));
  run.put("grid_k", c.grid_k);
  run.put("grid_step", format_real(c.grid_step));
  for (const auto& d : c.datasets) {
    auto& s = root.push_back({"dataset:" + d.id, {}})->second;
    s.put("name", d.spec.name);
    s.put("n", d.spec.n);
    s.put("sigma", format_real(d.spec.sigma));
    s.put("nonuniform", d.spec.nonuniform ? "true" : "false");
    s.put("gt_helpers", d.spec.ground_truth.helpers);
    s.put("gt_radius", format_real(d.spec.ground_truth.radius));
    if (d.epsilon) s.put("epsilon", format_real(*d.epsilon));
    if (d.k) s.put("k", *d.k);
    s.put("dm", d.dm ? "true" : "false");
    if (d.dm) {
      s.put("dm_epsilon", format_real(d.dm->epsilon_dm));
      s.put("dm_ell", d.dm->ell);
      s.put("dm_n_max", d.dm->n_max);
    }
  }
  std::ostringstream out;
  boost::property_tree::write_ini(out, root);
  return out.str();
}

inline RunConfig parse_config(std::istream& in) {
  using namespace config_detail;
  ptree root;
  try {
    boost::property_tree::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  RunConfig c;
  c.datasets.clear();
  bool have_run = false;
  for (const auto& [name, child] : root) {
    if (child.empty() && !child.data().empty()) throw ConfigError("key '" + name + "' outside any section");
    if (name == "run") {
      have_run = true;
      Section s("run", child);
      const auto version = s.take("schema_version");
      if (!version) throw ConfigError("[run] schema_version is required");
      c.schema_version = parse_number<int>(s.where("schema_version"), *version);
      if (auto v = s.take("seed")) c.seed = parse_number<std::uint64_t>(s.where("seed"), *v);
      if (auto v = s.take("output")) c.output = *v;
      if (auto v = s.take("detectors")) c.detectors = split_detectors(s.where("detectors"), *v);
      if (auto v = s.take("regularizer")) {
        if (*v == "auto") {
          c.regularizer.mode = RegularizerSpec::Mode::kAuto;
        } else if (*v == "theoretical") {
          c.regularizer.mode = RegularizerSpec::Mode::kTheoretical;
        } else {
          c.regularizer.mode = RegularizerSpec::Mode::kExplicit;
          c.regularizer.value = parse_number<double>(s.where("regularizer"), *v);
        }
      }
      if (auto v = s.take("s_factor")) c.regularizer.s_factor = parse_number<double>(s.where("s_factor"), *v);
      if (auto v = s.take("threshold_frac")) c.threshold_frac = parse_number<double>(s.where("threshold_frac"), *v);
      if (auto v = s.take("grid_k")) c.grid_k = parse_number<Index>(s.where("grid_k"), *v);
      if (auto v = s.take("grid_step")) c.grid_step = parse_number<double>(s.where("grid_step"), *v);
      s.finish();
    } else if (name.rfind("dataset:", 0) == 0) {
      DatasetEntry d;
      d.id = name.substr(8);
      Section s(name, child);
      const auto ds = s.take("name");
      if (!ds) throw ConfigError(s.where("name") + " is required");
      d.spec.name = *ds;
      if (auto v = s.take("n")) {
        d.spec.n = parse_number<Index>(s.where("n"), *v);
        if (d.spec.n == 0) throw ConfigError(s.where("n") + ": empty dataset");
      } else {
        try {
          d.spec.n = default_size(d.spec.name);
        } catch (const InvalidArgument& e) {
          throw ConfigError(s.where("name") + ": " + e.what());
        }
      }
      if (auto v = s.take("sigma")) d.spec.sigma = parse_number<double>(s.where("sigma"), *v);
      if (auto v = s.take("nonuniform")) d.spec.nonuniform = parse_bool(s.where("nonuniform"), *v);
      if (auto v = s.take("gt_helpers")) d.spec.ground_truth.helpers = parse_number<Index>(s.where("gt_helpers"), *v);
      if (auto v = s.take("gt_radius")) d.spec.ground_truth.radius = parse_number<double>(s.where("gt_radius"), *v);
      if (auto v = s.take("epsilon")) d.epsilon = parse_number<double>(s.where("epsilon"), *v);
      if (auto v = s.take("k")) d.k = parse_number<Index>(s.where("k"), *v);
      const auto dm = s.take("dm");
      const auto dm_eps = s.take("dm_epsilon");
      const auto dm_ell = s.take("dm_ell");
      const auto dm_nmax = s.take("dm_n_max");
      if (dm && parse_bool(s.where("dm"), *dm)) {
        DmParams p;
        if (dm_eps) p.epsilon_dm = parse_number<double>(s.where("dm_epsilon"), *dm_eps);
        if (dm_ell) p.ell = parse_number<Index>(s.where("dm_ell"), *dm_ell);
        if (dm_nmax) p.n_max = parse_number<Index>(s.where("dm_n_max"), *dm_nmax);
        d.dm = p;
      } else if (dm_eps || dm_ell || dm_nmax) {
        throw ConfigError(name + ": dm_* keys need dm = true");
      }
      s.finish();
      c.datasets.push_back(std::move(d));
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
  if (!have_run) throw ConfigError("missing [run] section");
  for (auto& d : c.datasets) d.spec.seed = c.seed;
  validate(c);
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return parse_config(in);
}

}  // namespace bdlle
