#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bdlle/datasets.hpp"
#include "bdlle/detectors.hpp"
#include "bdlle/diffusion.hpp"
#include "bdlle/eval.hpp"
#include "bdlle/point_cloud.hpp"

namespace bdlle::io {

using json = nlohmann::ordered_json;

inline json to_json(const NeighborParams& p) {
  if (const auto* e = std::get_if<EpsilonBall>(&p)) return {{"scheme", "ball"}, {"epsilon", e->epsilon}};
  return {{"scheme", "knn"}, {"k", std::get<Knn>(p).k}};
}

inline NeighborParams params_from_json(const json& j) {
  const auto scheme = j.at("scheme").get<std::string>();
  if (scheme == "ball") return EpsilonBall{j.at("epsilon").get<double>()};
  if (scheme == "knn") return Knn{j.at("k").get<Index>()};
  throw InvalidArgument("unknown neighbor scheme '" + scheme + "'");
}

/// Finite reals as numbers, infinities as null.
inline json real_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return a;
}

inline std::vector<double> real_array_from(const json& a) {
  std::vector<double> v;
  v.reserve(a.size());
  for (const auto& x : a) v.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
  return v;
}

/// `{n, params, c, threshold, B, boundary_indices}` for BD-LLE; baselines
/// carry their score columns, CPS its distance estimates.
inline json to_json(const Detection& det, Index n) {
  json j;
  j["detector"] = det.detector;
  j["n"] = n;
  j["params"] = to_json(det.params);
  if (det.bdlle) {
    j["c"] = det.bdlle->regularizer.c;
    j["regularizer"] = to_string(det.bdlle->regularizer.kind);
    j["threshold"] = det.bdlle->threshold;
    j["threshold_frac"] = det.bdlle->threshold_frac;
    j["B"] = det.bdlle->B;
  }
  if (det.baseline) {
    json s = json::object();
    for (const auto& col : det.baseline->scores) s[col.name] = real_array(col.values);
    j["scores"] = s;
  }
  if (det.cps) {
    j["tangent_dim"] = det.cps->tangent_dim;
    j["d_hat"] = real_array(det.cps->d_hat);
    if (det.cps_radius) j["radius"] = *det.cps_radius;
  }
  j["boundary_indices"] = det.boundary_indices;
  return j;
}

inline json to_json(const F1Report& r) {
  json per = json::array();
  for (const auto& [radius, f] : r.per_r) per.push_back({radius, f});
  return {{"detector", r.detector}, {"f1_max", r.f1_max}, {"best_r", r.best_r}, {"per_r", per}, {"skipped_r", r.skipped_r}};
}

inline json to_json(const DmEmbedding& e) {
  return {{"n", e.coords.rows()},
          {"ell", e.coords.cols()},
          {"eigenvalues", std::vector<double>(e.eigenvalues.data(), e.eigenvalues.data() + e.eigenvalues.size())}};
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

/// A detection read back for scoring: the flagged indices and, for CPS
/// output without a fixed radius, the per-point distance estimates.
struct DetectedSet {
  std::string detector;
  std::vector<Index> indices;
  std::optional<CpsDistances> cps;
};

inline DetectedSet detected_from_json(const json& j) {
  DetectedSet d;
  d.detector = j.value("detector", std::string());
  d.indices = j.at("boundary_indices").get<std::vector<Index>>();
  if (j.contains("d_hat") && !j.contains("radius")) {
    CpsDistances c;
    c.d_hat = real_array_from(j["d_hat"]);
    c.tangent_dim = j.value("tangent_dim", 2);
    if (j.contains("params") && j["params"].value("scheme", "") == "ball") c.epsilon = j["params"]["epsilon"];
    d.cps = std::move(c);
  }
  return d;
}

/// Reads `.json` detector output, or a CSV with one index per line in the
/// first column (so third-party detections can be scored).
inline DetectedSet read_detected(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) return detected_from_json(read_json(path));
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  const RowMatrix m = csv::read_matrix(in);
  DetectedSet d;
  d.detector = "external";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double v = m(i, 0);
    if (!(v >= 0.0) || v != std::floor(v)) throw InvalidArgument(path + ": indices must be non-negative integers");
    d.indices.push_back(static_cast<Index>(v));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Ground-truth sidecars

/// Columns: dist, then the intrinsic parameters, then dist_proxy if present.
inline void write_ground_truth(std::ostream& out, const DatasetBundle& b) {
  const auto n = static_cast<Eigen::Index>(b.size());
  const bool proxy = !b.dist_proxy.empty();
  const auto np = static_cast<Eigen::Index>(b.param_names.size());
  RowMatrix m(n, 1 + np + (proxy ? 1 : 0));
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, 0) = b.dist_to_boundary[static_cast<std::size_t>(i)];
    if (np) m.row(i).segment(1, np) = b.params.row(i);
    if (proxy) m(i, 1 + np) = b.dist_proxy[static_cast<std::size_t>(i)];
  }
  out << "# dataset=" << b.name << " d=" << b.d << " columns=dist";
  for (const auto& s : b.param_names) out << ',' << s;
  if (proxy) out << ",dist_proxy";
  out << '\n';
  csv::write_matrix(out, m);
}

inline void write_ground_truth(const std::string& path, const DatasetBundle& b) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_ground_truth(out, b);
}

/// First column of a ground-truth sidecar.
inline std::vector<double> read_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  const RowMatrix m = csv::read_matrix(in);
  if (m.cols() < 1) throw InvalidArgument(path + ": no columns");
  std::vector<double> d(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) d[static_cast<std::size_t>(i)] = m(i, 0);
  for (double x : d)
    if (!(x >= 0.0)) throw InvalidArgument(path + ": distances must be >= 0");
  return d;
}

inline std::string ground_truth_path(const std::string& out) { return out + ".gt.csv"; }
inline std::string clean_path(const std::string& out) { return out + ".clean.csv"; }

// ---------------------------------------------------------------------------
// Plot data

/// Per-point rows for plotting. Ambient coordinates for low-dimensional
/// clouds, intrinsic parameters once p exceeds 3; then B when known and the
/// detected flag.
inline void write_plot_data(std::ostream& out, const DatasetBundle& b, const Detection& det) {
  const Index n = b.size();
  const bool intrinsic = b.cloud.dim() > 3;
  std::vector<std::string> cols;
  if (intrinsic) {
    cols = b.param_names;
  } else {
    const char* names[] = {"x", "y", "z"};
    for (Index j = 0; j < b.cloud.dim(); ++j) cols.emplace_back(names[j]);
  }
  std::vector<char> flag(n, 0);
  for (Index k : det.boundary_indices) flag.at(k) = 1;
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j];
  if (det.bdlle) out << ",B";
  out << ",detected\n";
  out << std::setprecision(17);
  for (Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out << ',';
      const auto c = static_cast<Eigen::Index>(j);
      out << (intrinsic ? b.params(r, c) : b.cloud.points()(r, c));
    }
    if (det.bdlle) out << ',' << det.bdlle->B[i];
    out << ',' << (flag[i] ? 1 : 0) << '\n';
  }
}

}  // namespace bdlle::io
