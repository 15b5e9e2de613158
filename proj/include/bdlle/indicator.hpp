#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "bdlle/errors.hpp"
#include "bdlle/local_covariance.hpp"
#include "bdlle/neighbors.hpp"
#include "bdlle/parallel.hpp"
#include "bdlle/point_cloud.hpp"

namespace bdlle {

/// B_k = (N_k - c y^T 1)/N_k where (G^T G + c I) y = 1.
///
/// Evaluated as |R^{-T} G 1|^2 / N_k with R^T R = G G^T + c I taken from a QR
/// factorization of [G^T; sqrt(c) I] on the reduced frame of G. The result is
/// a sum of squares and keeps full relative accuracy even when B_k is tiny.
inline double boundary_indicator_at(const LocalDataMatrix& g, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("regularizer must be positive and finite");
  const Eigen::Index n = g.columns.cols();
  if (n == 0) throw EmptyNeighborhood(g.center);
  const Matrix f = reduced_frame(g.columns);
  const Eigen::Index m = f.rows();
  if (m == 0) return 0.0;
  Matrix stacked(n + m, m);
  stacked.topRows(n) = f.transpose();
  stacked.bottomRows(m) = Matrix::Identity(m, m) * std::sqrt(c);
  Eigen::HouseholderQR<Matrix> qr(stacked);
  const auto r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  Vector w = f.rowwise().sum();
  r.transpose().solveInPlace(w);
  const double b = w.squaredNorm() / static_cast<double>(n);
  if (!std::isfinite(b)) throw NumericalError("non-finite boundary indicator at point " + std::to_string(g.center));
  return b;
}

/// The same quantity through the regularized pseudo-inverse:
/// 1^T G^T I_c(C) G 1 / N_k. Intended for cross-checks on small instances.
inline double boundary_indicator_via_pseudo_inverse(const LocalDataMatrix& g, double c) {
  const auto spec = local_covariance_spectrum(g, true);
  const Vector g1 = g.columns.rowwise().sum();
  return g1.dot(regularized_pseudo_inverse(spec, c) * g1) / static_cast<double>(g.count());
}

struct BarycentricSolution {
  Vector y;
  Vector w;  ///< y / (y^T 1)
};

inline BarycentricSolution barycentric_weights(const LocalDataMatrix& g, double c) {
  if (!(c > 0.0)) throw InvalidArgument("regularizer must be > 0");
  const Eigen::Index n = g.columns.cols();
  if (n == 0) throw EmptyNeighborhood(g.center);
  const Matrix f = reduced_frame(g.columns);
  Matrix stacked(f.rows() + n, n);
  stacked.topRows(f.rows()) = f;
  stacked.bottomRows(n) = Matrix::Identity(n, n) * std::sqrt(c);
  Eigen::HouseholderQR<Matrix> qr(stacked);
  const auto r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  BarycentricSolution out;
  out.y = Vector::Ones(n);
  r.transpose().solveInPlace(out.y);
  r.solveInPlace(out.y);
  const double s = out.y.sum();
  if (!(std::abs(s) > 1e-300) || !std::isfinite(s)) throw DegenerateNormalization("y^T 1 vanishes");
  out.w = out.y / s;
  return out;
}

// ---------------------------------------------------------------------------
// Regularizer selection

enum class RegularizerKind { kExplicit, kSpectralGap, kDNonzero, kTheoretical };

inline std::string to_string(RegularizerKind k) {
  switch (k) {
    case RegularizerKind::kExplicit: return "explicit";
    case RegularizerKind::kSpectralGap: return "spectral-gap";
    case RegularizerKind::kDNonzero: return "d-nonzero";
    case RegularizerKind::kTheoretical: return "theoretical";
  }
  return "unknown";
}

struct Regularizer {
  double c = 0.0;
  RegularizerKind kind = RegularizerKind::kExplicit;
};

/// How the regularizer is chosen: a fixed value, the data-driven rule, or the
/// rate used in the asymptotic analysis.
struct RegularizerSpec {
  enum class Mode { kAuto, kExplicit, kTheoretical } mode = Mode::kAuto;
  double value = 0.0;       ///< used when mode == kExplicit
  double s_factor = 0.01;   ///< multiplier in the d-nonzero branch

  bool operator==(const RegularizerSpec&) const = default;
};

/// Per-point lambda_d and lambda_{d+1} and whether lambda_{d+1} is nonzero.
struct SpectrumSummary {
  std::vector<double> lambda_d;
  std::vector<double> lambda_d1;
  std::vector<char> d1_nonzero;
};

inline SpectrumSummary summarize_spectra(const PointCloud& cloud, const std::vector<NeighborSet>& nbrs, int d) {
  SpectrumSummary s;
  const Index n = nbrs.size();
  s.lambda_d.assign(n, 0.0);
  s.lambda_d1.assign(n, 0.0);
  s.d1_nonzero.assign(n, 0);
  parallel_for(n, [&](Index k) {
    const auto spec = local_covariance_spectrum(local_data_matrix(cloud, nbrs[k]));
    s.lambda_d[k] = spec.lambda(static_cast<Index>(d));
    s.lambda_d1[k] = spec.lambda(static_cast<Index>(d) + 1);
    s.d1_nonzero[k] = spec.rank > static_cast<Index>(d) ? 1 : 0;
  });
  return s;
}

/// The data-driven rule. With d < p and some nonzero lambda_{d+1}:
/// c = sqrt(sum lambda_d * sum lambda_{d+1}) / n. Otherwise
/// c = (s/n) sum lambda_d, where s is halved to stay below `scale` if needed.
inline Regularizer select_regularizer(const SpectrumSummary& s, int d, Index p, double scale, double s_factor = 0.01) {
  const auto n = static_cast<double>(s.lambda_d.size());
  if (n == 0) throw InvalidArgument("no spectra given");
  double sum_d = 0.0;
  double sum_d1 = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < s.lambda_d.size(); ++i) {
    sum_d += s.lambda_d[i];
    sum_d1 += s.lambda_d1[i];
    any = any || s.d1_nonzero[i];
  }
  if (!(sum_d > 0.0)) throw NumericalError("every lambda_d vanishes; the cloud is degenerate for this d");
  if (static_cast<Index>(d) < p && any) return {std::sqrt(sum_d * sum_d1) / n, RegularizerKind::kSpectralGap};
  double factor = s_factor;
  if (scale > 0.0 && factor >= scale) factor = 0.5 * scale;
  return {factor / n * sum_d, RegularizerKind::kDNonzero};
}

/// Characteristic length of a neighbor scheme: epsilon, or (K/n)^{1/d}.
inline double scheme_scale(const NeighborParams& params, Index n, int d) {
  if (const auto* e = std::get_if<EpsilonBall>(&params)) return e->epsilon;
  return std::pow(static_cast<double>(std::get<Knn>(params).k) / static_cast<double>(n), 1.0 / d);
}

/// n eps^{d+3}, or n (K/n)^{(d+3)/d}.
inline double theoretical_regularizer(const NeighborParams& params, Index n, int d) {
  return static_cast<double>(n) * std::pow(scheme_scale(params, n, d), d + 3);
}

// ---------------------------------------------------------------------------
// Scale selection

/// ceil(n^{1/(1+d/2)}), kept inside [1, n-1].
inline Index select_K(Index n, int d) {
  if (d < 1) throw InvalidArgument("d must be >= 1");
  if (n < 3) return 1;
  const double x = std::pow(static_cast<double>(n), 1.0 / (1.0 + 0.5 * d));
  const double near = std::round(x);
  const double k = std::abs(x - near) <= 1e-9 * x ? near : std::ceil(x);
  return std::clamp<Index>(static_cast<Index>(k), 1, n - 1);
}

struct EpsilonRange {
  double min = 0.0;  ///< median K-distance
  double max = 0.0;  ///< largest K-distance
  Index k = 0;

  double midpoint() const { return 0.5 * (min + max); }
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline EpsilonRange select_epsilon_range(const NeighborIndex& index, int d) {
  const Index n = index.size();
  if (n < 2) throw InvalidArgument("need at least two points");
  EpsilonRange out;
  out.k = select_K(n, d);
  std::vector<double> r(n);
  parallel_for(n, [&](Index k) { r[k] = index.k_distance(k, out.k); });
  out.max = *std::max_element(r.begin(), r.end());
  out.min = median(std::move(r));
  return out;
}

// ---------------------------------------------------------------------------
// Detection

struct BoundaryReport {
  std::vector<double> B;
  double threshold = 0.0;
  double threshold_frac = 0.5;
  std::vector<Index> boundary_indices;
  NeighborParams params;
  Regularizer regularizer;
};

struct DetectOptions {
  int d = 2;
  RegularizerSpec regularizer;
  double threshold_frac = 0.5;
};

inline Regularizer resolve_regularizer(const PointCloud& cloud, const std::vector<NeighborSet>& nbrs,
                                       const NeighborParams& params, const DetectOptions& opt) {
  switch (opt.regularizer.mode) {
    case RegularizerSpec::Mode::kExplicit:
      if (!(opt.regularizer.value > 0.0)) throw InvalidArgument("explicit regularizer must be > 0");
      return {opt.regularizer.value, RegularizerKind::kExplicit};
    case RegularizerSpec::Mode::kTheoretical:
      return {theoretical_regularizer(params, cloud.size(), opt.d), RegularizerKind::kTheoretical};
    case RegularizerSpec::Mode::kAuto:
      break;
  }
  if (static_cast<Index>(opt.d) > cloud.dim()) throw InvalidArgument("d exceeds the ambient dimension");
  return select_regularizer(summarize_spectra(cloud, nbrs, opt.d), opt.d, cloud.dim(),
                            scheme_scale(params, cloud.size(), opt.d), opt.regularizer.s_factor);
}

/// {k : B_k >= frac * max B}.
inline std::vector<Index> threshold_indices(const std::vector<double>& b, double threshold) {
  std::vector<Index> out;
  for (Index k = 0; k < b.size(); ++k) {
    if (b[k] >= threshold) out.push_back(k);
  }
  return out;
}

/// BD-LLE on a whole cloud.
inline BoundaryReport detect_boundary(const NeighborIndex& index, const NeighborParams& params,
                                      const DetectOptions& opt = {}) {
  if (opt.d < 1) throw InvalidArgument("d must be >= 1");
  if (!(opt.threshold_frac > 0.0) || opt.threshold_frac > 1.0) throw InvalidArgument("threshold fraction must be in (0, 1]");
  const PointCloud& cloud = index.cloud();
  const auto nbrs = all_neighbors(index, params);
  BoundaryReport rep;
  rep.params = params;
  rep.threshold_frac = opt.threshold_frac;
  rep.regularizer = resolve_regularizer(cloud, nbrs, params, opt);
  rep.B.assign(cloud.size(), 0.0);
  const double c = rep.regularizer.c;
  parallel_for(cloud.size(), [&](Index k) { rep.B[k] = boundary_indicator_at(local_data_matrix(cloud, nbrs[k]), c); });
  rep.threshold = opt.threshold_frac * *std::max_element(rep.B.begin(), rep.B.end());
  rep.boundary_indices = threshold_indices(rep.B, rep.threshold);
  return rep;
}

/// Diagnostic only: the d maximizing mean(lambda_d)/mean(lambda_{d+1}) over
/// the first `max_dim` eigenvalues of the local covariances.
inline int estimate_intrinsic_dimension(const PointCloud& cloud, const std::vector<NeighborSet>& nbrs,
                                        Index max_dim = 10) {
  const Index len = std::min(max_dim, cloud.dim());
  std::vector<Vector> per(nbrs.size());
  parallel_for(nbrs.size(), [&](Index k) {
    const auto spec = local_covariance_spectrum(local_data_matrix(cloud, nbrs[k]));
    per[k] = spec.eigenvalues.head(static_cast<Eigen::Index>(len));
    if (per[k][0] > 0.0) per[k] /= per[k][0];
  });
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(len));
  for (const auto& v : per) mean += v;
  if (len < 2) return 1;
  int best = 1;
  double best_ratio = -1.0;
  for (Eigen::Index i = 0; i + 1 < mean.size(); ++i) {
    const double ratio = mean[i + 1] > 0.0 ? mean[i] / mean[i + 1] : std::numeric_limits<double>::infinity();
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = static_cast<int>(i + 1);
    }
    if (std::isinf(ratio)) break;
  }
  return best;
}

}  // namespace bdlle
