#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdlle/errors.hpp"
#include "bdlle/geodesic.hpp"
#include "bdlle/point_cloud.hpp"
#include "bdlle/rng.hpp"

namespace bdlle {

/// A sampled benchmark cloud with per-point ground truth.
struct DatasetBundle {
  std::string name;
  int d = 2;
  PointCloud cloud;
  std::vector<double> dist_to_boundary;
  std::vector<std::string> param_names;
  RowMatrix params;                    ///< n x param_names.size()
  std::optional<PointCloud> clean;     ///< noise-free points, noisy datasets only
  std::vector<double> dist_proxy;      ///< closed-form stand-in, noisy datasets only

  Index size() const noexcept { return cloud.size(); }

  /// First m points with all per-point fields. Points are i.i.d., so this is
  /// a random subsample.
  DatasetBundle prefix(Index m) const {
    DatasetBundle out;
    out.name = name;
    out.d = d;
    out.cloud = cloud.prefix(m);
    out.dist_to_boundary.assign(dist_to_boundary.begin(), dist_to_boundary.begin() + static_cast<std::ptrdiff_t>(m));
    out.param_names = param_names;
    out.params = params.topRows(static_cast<Eigen::Index>(m));
    if (clean) out.clean = clean->prefix(m);
    if (!dist_proxy.empty())
      out.dist_proxy.assign(dist_proxy.begin(), dist_proxy.begin() + static_cast<std::ptrdiff_t>(m));
    return out;
  }
};

/// Density of helper nodes and connectivity radius of the geodesic graph.
struct GroundTruthOptions {
  Index helpers = 0;
  double radius = 0.0;
  Index boundary_nodes = 2000;

  bool operator==(const GroundTruthOptions&) const = default;
};

namespace datasets {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTorusR = 3.0;
inline constexpr double kTorusr = 1.2;
inline constexpr double kTcutLevel = 2.8;
inline constexpr Index kNoisyAmbient = 500;
inline constexpr Index kNoisyCurved = 22;
inline constexpr Index kKleinAmbient = 500;

enum class DiskMode { kUniform, kNonuniform };

inline std::array<double, 3> torus(double theta, double phi) {
  const double ring = kTorusR + kTorusr * std::cos(theta);
  return {ring * std::cos(phi), ring * std::sin(phi), kTorusr * std::sin(theta)};
}

/// Rotation by 3 pi / 4 about the y-axis.
inline std::array<double, 3> tilt(const std::array<double, 3>& x) {
  const double c = std::cos(0.75 * kPi);
  const double s = std::sin(0.75 * kPi);
  return {c * x[0] - s * x[2], x[1], s * x[0] + c * x[2]};
}

inline std::array<double, 4> klein(double theta, double phi) {
  const double ring = 1.0 + 0.5 * std::cos(theta);
  return {ring * std::cos(phi), ring * std::sin(phi), 0.5 * std::sin(theta) * std::cos(0.5 * phi),
          0.5 * std::sin(theta) * std::sin(0.5 * phi)};
}

namespace detail {

inline void check_n(Index n) {
  if (n < 1) throw InvalidArgument("sample size must be >= 1");
}

inline std::string stream_name(const std::string& dataset, const char* purpose) { return dataset + "/" + purpose; }

/// Rows of `a` followed by rows of `b`.
inline RowMatrix stack(const RowMatrix& a, const RowMatrix& b) {
  RowMatrix out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

inline std::vector<Index> range(Index begin, Index end) {
  std::vector<Index> out;
  for (Index i = begin; i < end; ++i) out.push_back(i);
  return out;
}

/// Shortest paths from `boundary` to the rows of `samples` through a graph that
/// also contains `helpers`; search and metric coordinates coincide.
inline std::vector<double> ambient_geodesic(const RowMatrix& samples, const RowMatrix& helpers,
                                            const RowMatrix& boundary, double radius) {
  GeodesicGraph g;
  g.search = stack(stack(samples, helpers), boundary);
  g.metric = g.search;
  const auto first = static_cast<Index>(samples.rows() + helpers.rows());
  g.sources = range(first, first + static_cast<Index>(boundary.rows()));
  return graph_geodesic_distance(g, static_cast<Index>(samples.rows()), {radius, 3});
}

template <std::size_t N>
void put(RowMatrix& m, Eigen::Index i, const std::array<double, N>& x) {
  for (std::size_t j = 0; j < N; ++j) m(i, static_cast<Eigen::Index>(j)) = x[j];
}

// V-cut parameters: theta on [-pi, pi), phi on [-pi, pi) minus (-0.5, 0.5).
inline std::pair<double, double> vcut_draw(RandomStream& rs) {
  const double theta = rs.uniform(-kPi, kPi);
  double phi = -kPi + rs.uniform(0.0, 2.0 * kPi - 1.0);
  if (phi >= -0.5) phi += 1.0;
  return {theta, phi};
}

}  // namespace detail

inline DatasetBundle sample_disk(Index n, std::uint64_t seed, DiskMode mode = DiskMode::kUniform) {
  detail::check_n(n);
  DatasetBundle b;
  b.name = "disk";
  b.d = 2;
  RandomStream rs(seed, detail::stream_name(b.name, "points"));
  RowMatrix z(static_cast<Eigen::Index>(n), 2);
  b.params.resize(static_cast<Eigen::Index>(n), 2);
  b.param_names = {"r", "angle"};
  b.dist_to_boundary.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double u = rs.uniform();
    const double r = mode == DiskMode::kUniform ? std::sqrt(u) : u;
    const double a = rs.uniform(0.0, 2.0 * kPi);
    const auto e = static_cast<Eigen::Index>(i);
    z(e, 0) = r * std::cos(a);
    z(e, 1) = r * std::sin(a);
    b.params(e, 0) = r;
    b.params(e, 1) = a;
    b.dist_to_boundary[i] = 1.0 - z.row(e).norm();
  }
  b.cloud = PointCloud(std::move(z));
  return b;
}

inline DatasetBundle sample_ball(Index n, std::uint64_t seed) {
  detail::check_n(n);
  DatasetBundle b;
  b.name = "ball";
  b.d = 3;
  RandomStream rs(seed, detail::stream_name(b.name, "points"));
  RowMatrix z(static_cast<Eigen::Index>(n), 3);
  b.params.resize(static_cast<Eigen::Index>(n), 3);
  b.param_names = {"r", "theta", "phi"};
  b.dist_to_boundary.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double r = rs.uniform();
    const double theta = rs.uniform(0.0, 2.0 * kPi);
    const double phi = rs.uniform(0.0, kPi);
    const double s = std::sqrt(r);
    const auto e = static_cast<Eigen::Index>(i);
    z(e, 0) = s * std::sin(phi) * std::cos(theta);
    z(e, 1) = s * std::sin(phi) * std::sin(theta);
    z(e, 2) = s * std::cos(phi);
    b.params.row(e) << r, theta, phi;
    b.dist_to_boundary[i] = std::max(0.0, 1.0 - z.row(e).norm());
  }
  b.cloud = PointCloud(std::move(z));
  return b;
}

inline DatasetBundle sample_vcut_torus(Index n, std::uint64_t seed, GroundTruthOptions gt = {60000, 0.12, 2000}) {
  detail::check_n(n);
  DatasetBundle b;
  b.name = "vcut";
  b.d = 2;
  b.param_names = {"theta", "phi"};
  RandomStream rs(seed, detail::stream_name(b.name, "points"));
  RowMatrix z(static_cast<Eigen::Index>(n), 3);
  b.params.resize(static_cast<Eigen::Index>(n), 2);
  for (Index i = 0; i < n; ++i) {
    const auto [theta, phi] = detail::vcut_draw(rs);
    detail::put(z, static_cast<Eigen::Index>(i), torus(theta, phi));
    b.params.row(static_cast<Eigen::Index>(i)) << theta, phi;
  }
  RandomStream hs(seed, detail::stream_name(b.name, "helpers"));
  RowMatrix helpers(static_cast<Eigen::Index>(gt.helpers), 3);
  for (Index i = 0; i < gt.helpers; ++i) {
    const auto [theta, phi] = detail::vcut_draw(hs);
    detail::put(helpers, static_cast<Eigen::Index>(i), torus(theta, phi));
  }
  const Index m = gt.boundary_nodes;
  RowMatrix boundary(static_cast<Eigen::Index>(2 * m), 3);
  for (Index i = 0; i < m; ++i) {
    const double theta = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
    detail::put(boundary, static_cast<Eigen::Index>(2 * i), torus(theta, 0.5));
    detail::put(boundary, static_cast<Eigen::Index>(2 * i + 1), torus(theta, -0.5));
  }
  b.dist_to_boundary = detail::ambient_geodesic(z, helpers, boundary, gt.radius);
  b.cloud = PointCloud(std::move(z));
  return b;
}

/// Points of the cut curve w' = 2.8 on the tilted torus, from a sweep in phi
/// and a sweep in theta (each captures the parts of the curve the other
/// samples sparsely).
inline RowMatrix tcut_boundary(Index m) {
  const double h = kTcutLevel * std::sqrt(2.0);  // (3 + 1.2 cos t) cos f - 1.2 sin t = h
  std::vector<std::array<double, 3>> pts;
  for (Index i = 0; i < m; ++i) {
    const double phi = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
    const double a = std::sqrt(std::cos(phi) * std::cos(phi) + 1.0);
    const double alpha = std::atan2(1.0, std::cos(phi));
    const double rhs = (h - kTorusR * std::cos(phi)) / kTorusr / a;
    if (std::abs(rhs) > 1.0) continue;
    for (double sgn : {1.0, -1.0}) pts.push_back(tilt(torus(sgn * std::acos(rhs) - alpha, phi)));
  }
  for (Index i = 0; i < m; ++i) {
    const double theta = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m);
    const double cphi = (h + kTorusr * std::sin(theta)) / (kTorusR + kTorusr * std::cos(theta));
    if (std::abs(cphi) > 1.0) continue;
    for (double sgn : {1.0, -1.0}) pts.push_back(tilt(torus(theta, sgn * std::acos(cphi))));
  }
  RowMatrix out(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) detail::put(out, static_cast<Eigen::Index>(i), pts[i]);
  return out;
}

/// Draws n_raw torus points and keeps those with w' < 2.8 after the tilt, so
/// the kept count is itself random.
inline DatasetBundle sample_tcut_torus(Index n_raw, std::uint64_t seed, GroundTruthOptions gt = {60000, 0.12, 2000}) {
  detail::check_n(n_raw);
  DatasetBundle b;
  b.name = "tcut";
  b.d = 2;
  b.param_names = {"theta", "phi"};
  auto draw = [](RandomStream& rs, Index count, std::vector<std::array<double, 5>>& out) {
    for (Index i = 0; i < count; ++i) {
      const double theta = rs.uniform(-kPi, kPi);
      const double phi = rs.uniform(-kPi, kPi);
      const auto x = tilt(torus(theta, phi));
      if (x[2] < kTcutLevel) out.push_back({x[0], x[1], x[2], theta, phi});
    }
  };
  std::vector<std::array<double, 5>> kept, help;
  RandomStream rs(seed, detail::stream_name(b.name, "points"));
  draw(rs, n_raw, kept);
  if (kept.empty()) throw InvalidArgument("no T-cut samples survived the cut");
  RandomStream hs(seed, detail::stream_name(b.name, "helpers"));
  draw(hs, gt.helpers, help);
  RowMatrix z(static_cast<Eigen::Index>(kept.size()), 3);
  b.params.resize(z.rows(), 2);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    z.row(e) << kept[i][0], kept[i][1], kept[i][2];
    b.params.row(e) << kept[i][3], kept[i][4];
  }
  RowMatrix helpers(static_cast<Eigen::Index>(help.size()), 3);
  for (std::size_t i = 0; i < help.size(); ++i) helpers.row(static_cast<Eigen::Index>(i)) << help[i][0], help[i][1], help[i][2];
  b.dist_to_boundary = detail::ambient_geodesic(z, helpers, tcut_boundary(gt.boundary_nodes), gt.radius);
  b.cloud = PointCloud(std::move(z));
  return b;
}

inline DatasetBundle sample_klein(Index n, std::uint64_t seed, GroundTruthOptions gt = {80000, 0.06, 3000}) {
  detail::check_n(n);
  DatasetBundle b;
  b.name = "klein";
  b.d = 2;
  b.param_names = {"theta", "phi"};
  auto draw = [](RandomStream& rs) {
    while (true) {
      const double theta = rs.uniform(0.0, 2.0 * kPi);
      const double phi = rs.uniform(0.0, 2.0 * kPi);
      if ((theta - kPi) * (theta - kPi) + (phi - kPi) * (phi - kPi) >= 1.0) return std::pair{theta, phi};
    }
  };
  RandomStream rs(seed, detail::stream_name(b.name, "points"));
  RowMatrix w(static_cast<Eigen::Index>(n), 4);
  b.params.resize(static_cast<Eigen::Index>(n), 2);
  for (Index i = 0; i < n; ++i) {
    const auto [theta, phi] = draw(rs);
    detail::put(w, static_cast<Eigen::Index>(i), klein(theta, phi));
    b.params.row(static_cast<Eigen::Index>(i)) << theta, phi;
  }
  RandomStream hs(seed, detail::stream_name(b.name, "helpers"));
  RowMatrix helpers(static_cast<Eigen::Index>(gt.helpers), 4);
  for (Index i = 0; i < gt.helpers; ++i) {
    const auto [theta, phi] = draw(hs);
    detail::put(helpers, static_cast<Eigen::Index>(i), klein(theta, phi));
  }
  RowMatrix boundary(static_cast<Eigen::Index>(gt.boundary_nodes), 4);
  for (Index i = 0; i < gt.boundary_nodes; ++i) {
    const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(gt.boundary_nodes);
    detail::put(boundary, static_cast<Eigen::Index>(i), klein(kPi + std::cos(a), kPi + std::sin(a)));
  }
  b.dist_to_boundary = detail::ambient_geodesic(w, helpers, boundary, gt.radius);
  RowMatrix z = RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kKleinAmbient));
  z.leftCols(4) = w;
  b.cloud = PointCloud(std::move(z));
  return b;
}

/// Clean embedding of the curved disk: (u, v, 0.2 sin(2 pi (u^2+v^2)),
/// a_j u^2 + b_j v^2 for j = 1..22), before zero padding.
inline RowMatrix noisy_disk_embedding(const RowMatrix& uv, const Vector& a, const Vector& b) {
  RowMatrix f(uv.rows(), static_cast<Eigen::Index>(3 + kNoisyCurved));
  for (Eigen::Index i = 0; i < uv.rows(); ++i) {
    const double u = uv(i, 0), v = uv(i, 1);
    f(i, 0) = u;
    f(i, 1) = v;
    f(i, 2) = 0.2 * std::sin(2.0 * kPi * (u * u + v * v));
    f.row(i).tail(static_cast<Eigen::Index>(kNoisyCurved)) = (a * (u * u) + b * (v * v)).transpose();
  }
  return f;
}

/// Curved disk in R^500 plus isotropic Gaussian noise of scale sigma. Ground
/// truth is the geodesic distance on the clean surface, from a graph whose
/// edges are found in (u, v) and weighted by ambient chord length.
inline DatasetBundle sample_noisy_disk(Index n, std::uint64_t seed, double sigma = 0.05,
                                       GroundTruthOptions gt = {20000, 0.05, 2000}) {
  detail::check_n(n);
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  DatasetBundle b;
  b.name = "noisy-disk";
  b.d = 2;
  b.param_names = {"u", "v"};
  RandomStream cs(seed, detail::stream_name(b.name, "coefficients"));
  Vector ca(static_cast<Eigen::Index>(kNoisyCurved)), cb(static_cast<Eigen::Index>(kNoisyCurved));
  for (Eigen::Index j = 0; j < ca.size(); ++j) ca[j] = 0.1 * cs.normal();
  for (Eigen::Index j = 0; j < cb.size(); ++j) cb[j] = 0.05 * cs.normal();

  auto draw_uv = [](RandomStream& rs, Index count) {
    RowMatrix uv(static_cast<Eigen::Index>(count), 2);
    for (Index i = 0; i < count; ++i) {
      const double r = std::sqrt(rs.uniform());
      const double t = rs.uniform(0.0, 2.0 * kPi);
      uv.row(static_cast<Eigen::Index>(i)) << r * std::cos(t), r * std::sin(t);
    }
    return uv;
  };
  RandomStream ps(seed, detail::stream_name(b.name, "points"));
  b.params = draw_uv(ps, n);
  RandomStream hs(seed, detail::stream_name(b.name, "helpers"));
  const RowMatrix helper_uv = draw_uv(hs, gt.helpers);
  RowMatrix circle(static_cast<Eigen::Index>(gt.boundary_nodes), 2);
  for (Index i = 0; i < gt.boundary_nodes; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(gt.boundary_nodes);
    circle.row(static_cast<Eigen::Index>(i)) << std::cos(t), std::sin(t);
  }

  const RowMatrix f = noisy_disk_embedding(b.params, ca, cb);
  GeodesicGraph g;
  g.search = detail::stack(detail::stack(b.params, helper_uv), circle);
  g.metric = noisy_disk_embedding(g.search, ca, cb);
  const auto first = static_cast<Index>(n + gt.helpers);
  g.sources = detail::range(first, first + gt.boundary_nodes);
  b.dist_to_boundary = graph_geodesic_distance(g, n, {gt.radius, 3});
  b.dist_proxy.resize(n);
  for (Index i = 0; i < n; ++i) b.dist_proxy[i] = std::max(0.0, 1.0 - b.params.row(static_cast<Eigen::Index>(i)).norm());

  RowMatrix clean = RowMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kNoisyAmbient));
  clean.leftCols(f.cols()) = f;
  RandomStream ns(seed, detail::stream_name(b.name, "noise"));
  RowMatrix noisy = clean;
  for (Eigen::Index i = 0; i < noisy.rows(); ++i)
    for (Eigen::Index j = 0; j < noisy.cols(); ++j) noisy(i, j) += sigma * ns.normal();
  b.clean = PointCloud(std::move(clean));
  b.cloud = PointCloud(std::move(noisy));
  return b;
}

}  // namespace datasets

/// Everything needed to reproduce one bundle.
struct DatasetSpec {
  std::string name = "disk";
  Index n = 0;  ///< 0 selects the dataset default
  std::uint64_t seed = 0;
  double sigma = 0.05;
  bool nonuniform = false;  ///< disk only
  GroundTruthOptions ground_truth{};  ///< zeros select the dataset default

  bool operator==(const DatasetSpec&) const = default;
};

inline Index default_size(const std::string& name) {
  if (name == "disk") return 4000;
  if (name == "ball") return 8000;
  if (name == "vcut") return 5056;
  if (name == "tcut") return 8000;
  if (name == "klein") return 9689;
  if (name == "noisy-disk") return 7897;
  throw InvalidArgument("unknown dataset '" + name + "'");
}

inline DatasetBundle sample_dataset(const DatasetSpec& spec) {
  const Index n = spec.n ? spec.n : default_size(spec.name);
  auto gt = [&](GroundTruthOptions def) {
    if (spec.ground_truth.helpers) def.helpers = spec.ground_truth.helpers;
    if (spec.ground_truth.radius > 0.0) def.radius = spec.ground_truth.radius;
    return def;
  };
  using namespace datasets;
  if (spec.name == "disk") return sample_disk(n, spec.seed, spec.nonuniform ? DiskMode::kNonuniform : DiskMode::kUniform);
  if (spec.name == "ball") return sample_ball(n, spec.seed);
  if (spec.name == "vcut") return sample_vcut_torus(n, spec.seed, gt({60000, 0.12, 2000}));
  if (spec.name == "tcut") return sample_tcut_torus(n, spec.seed, gt({60000, 0.12, 2000}));
  if (spec.name == "klein") return sample_klein(n, spec.seed, gt({80000, 0.06, 3000}));
  if (spec.name == "noisy-disk") return sample_noisy_disk(n, spec.seed, spec.sigma, gt({20000, 0.05, 2000}));
  throw InvalidArgument("unknown dataset '" + spec.name + "'");
}

}  // namespace bdlle
