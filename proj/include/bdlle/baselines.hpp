#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bdlle/errors.hpp"
#include "bdlle/neighbors.hpp"
#include "bdlle/parallel.hpp"
#include "bdlle/point_cloud.hpp"
#include "bdlle/theory.hpp"

namespace bdlle {

struct ScoreColumn {
  std::string name;
  std::vector<double> values;
};

struct BaselineResult {
  std::string name;
  std::vector<Index> boundary_indices;
  std::vector<ScoreColumn> scores;

  const std::vector<double>& score(const std::string& key) const {
    for (const auto& s : scores)
      if (s.name == key) return s.values;
    throw InvalidArgument("no score column '" + key + "'");
  }
};

/// Nearest-rank percentile: the smallest value v such that at least pct
/// percent of the data is <= v.
inline double percentile(std::vector<double> v, double pct) {
  if (v.empty()) throw InvalidArgument("percentile of an empty set");
  if (!(pct >= 0.0 && pct <= 100.0)) throw InvalidArgument("percentile must lie in [0, 100]");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

namespace detail {

inline std::vector<NeighborSet> knn_sets(const NeighborIndex& index, Index K) {
  return all_neighbors(index, Knn{K});
}

template <class Pred>
std::vector<Index> select(Index n, Pred&& keep) {
  std::vector<Index> out;
  for (Index k = 0; k < n; ++k)
    if (keep(k)) out.push_back(k);
  return out;
}

inline double log_sum_exp(const std::vector<double>& x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace detail

/// Reverse K-nearest-neighbor counts; boundary where the count is below its
/// pct-th percentile.
inline BaselineResult border(const NeighborIndex& index, Index K, double pct = 5.0) {
  const Index n = index.size();
  const auto sets = detail::knn_sets(index, K);
  std::vector<double> reverse(n, 0.0);
  for (const auto& s : sets)
    for (Index j : s.indices) reverse[j] += 1.0;
  const double delta = percentile(reverse, pct);
  BaselineResult r{"border", detail::select(n, [&](Index k) { return reverse[k] < delta; }), {}};
  r.scores.push_back({"reverse_count", std::move(reverse)});
  return r;
}

/// BRIM over epsilon-ball neighborhoods. A point whose ball holds no other
/// point gets BD = 0.
inline BaselineResult brim(const NeighborIndex& index, double epsilon, double pct = 95.0) {
  const Index n = index.size();
  const auto sets = all_neighbors(index, EpsilonBall{epsilon}, EmptyPolicy::kAllow);
  const auto& cloud = index.cloud();
  std::vector<double> bd(n, 0.0), pn(n, 0.0), nn(n, 0.0);
  std::vector<double> attractor(n, -1.0);
  parallel_for(n, [&](Index k) {
    const auto& s = sets[k];
    if (s.empty()) return;
    Index att = s.indices.front();
    for (Index i : s.indices) {
      const Index ci = sets[i].count(), ca = sets[att].count();
      if (ci > ca || (ci == ca && i < att)) att = i;
    }
    const auto zk = cloud.point(k);
    const Eigen::RowVectorXd a = cloud.point(att) - zk;
    double p = 0.0, q = 0.0;
    for (Index i : s.indices) {
      if (i == att || (cloud.point(i) - zk).dot(a) >= 0.0) {
        p += 1.0;
      } else {
        q += 1.0;
      }
    }
    pn[k] = p;
    nn[k] = q;
    bd[k] = p / std::max(q, 1.0) * std::abs(p - q);
    attractor[k] = static_cast<double>(att);
  });
  const double delta = percentile(bd, pct);
  BaselineResult r{"brim", detail::select(n, [&](Index k) { return bd[k] > delta; }), {}};
  r.scores = {{"bd", std::move(bd)}, {"pn", std::move(pn)}, {"nn", std::move(nn)}, {"attractor", std::move(attractor)}};
  return r;
}

/// Inverse mean neighbor distance D and its population variance VD over the
/// closed neighborhood.
inline BaselineResult band(const NeighborIndex& index, Index K, double pct_low = 20.0, double pct_high = 80.0) {
  const Index n = index.size();
  const auto sets = detail::knn_sets(index, K);
  std::vector<double> density(n), variance(n);
  parallel_for(n, [&](Index k) {
    double sum = 0.0;
    for (double d : sets[k].distances) sum += d;
    density[k] = static_cast<double>(sets[k].count()) / sum;
  });
  parallel_for(n, [&](Index k) {
    const auto& s = sets[k];
    const double m = static_cast<double>(s.count() + 1);
    double mean = density[k];
    for (Index i : s.indices) mean += density[i];
    mean /= m;
    double var = (density[k] - mean) * (density[k] - mean);
    for (Index i : s.indices) var += (density[i] - mean) * (density[i] - mean);
    variance[k] = var / m;
  });
  const double lo = percentile(density, pct_low);
  const double hi = percentile(variance, pct_high);
  BaselineResult r{"band", detail::select(n, [&](Index k) { return density[k] < lo && variance[k] > hi; }), {}};
  r.scores = {{"D", std::move(density)}, {"VD", std::move(variance)}};
  return r;
}

/// Asymmetry s = |sum (z_i - z_k)|_1 and density f = exp(mean squared
/// distance). f is reported as log f, which keeps the score finite and leaves
/// the percentile comparison unchanged.
inline BaselineResult spinver(const NeighborIndex& index, Index K, double pct_s = 95.0, double pct_f = 5.0) {
  const Index n = index.size();
  const auto sets = detail::knn_sets(index, K);
  const auto& cloud = index.cloud();
  std::vector<double> s(n), log_f(n);
  parallel_for(n, [&](Index k) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(cloud.dim()));
    double sq = 0.0;
    for (std::size_t j = 0; j < sets[k].count(); ++j) {
      sum += cloud.point(sets[k].indices[j]) - cloud.point(k);
      sq += sets[k].distances[j] * sets[k].distances[j];
    }
    s[k] = sum.lpNorm<1>();
    log_f[k] = sq / static_cast<double>(sets[k].count());
  });
  const double ds = percentile(s, pct_s);
  const double df = percentile(log_f, pct_f);
  BaselineResult r{"spinver", detail::select(n, [&](Index k) { return s[k] > ds && log_f[k] < df; }), {}};
  r.scores = {{"s", std::move(s)}, {"log_f", std::move(log_f)}};
  return r;
}

/// H = |z_k - mean(O_k)|_1 and D = sum exp(|z_i - z_k|), the latter reported
/// as log D.
inline BaselineResult lever(const NeighborIndex& index, Index K, double pct_h = 95.0, double pct_d = 5.0) {
  const Index n = index.size();
  const auto sets = detail::knn_sets(index, K);
  const auto& cloud = index.cloud();
  std::vector<double> h(n), log_d(n);
  parallel_for(n, [&](Index k) {
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(cloud.dim()));
    for (Index i : sets[k].indices) mean += cloud.point(i);
    mean /= static_cast<double>(sets[k].count());
    h[k] = (cloud.point(k) - mean).lpNorm<1>();
    log_d[k] = detail::log_sum_exp(sets[k].distances);
  });
  const double dh = percentile(h, pct_h);
  const double dd = percentile(log_d, pct_d);
  BaselineResult r{"lever", detail::select(n, [&](Index k) { return h[k] > dh && log_d[k] < dd; }), {}};
  r.scores = {{"H", std::move(h)}, {"log_D", std::move(log_d)}};
  return r;
}

struct CpsDistances {
  std::vector<double> d_hat;  ///< +inf where the drift vector vanishes
  int tangent_dim = 2;
  double epsilon = 0.0;
};

namespace detail {

/// Orthonormal basis (p x r, r <= d) of the top-d eigenvectors of G G^T,
/// built from whichever of G G^T and G^T G is smaller.
inline Matrix tangent_basis(const Matrix& g, int d) {
  const Eigen::Index p = g.rows(), m = g.cols();
  if (m == 0) return Matrix(p, 0);
  Vector ev;
  Matrix vec;
  const bool gram = m < p;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram ? Matrix(g.transpose() * g) : Matrix(g * g.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in CPS tangent estimate");
    ev = es.eigenvalues().reverse();
    vec = es.eigenvectors().rowwise().reverse();
  }
  const double cut = 1e-12 * std::max(ev[0], 0.0);
  Eigen::Index r = 0;
  while (r < std::min<Eigen::Index>(d, ev.size()) && ev[r] > cut) ++r;
  if (!gram) return vec.leftCols(r);
  Matrix u = g * vec.leftCols(r);
  for (Eigen::Index j = 0; j < r; ++j) u.col(j) /= std::sqrt(ev[j]);
  return u;
}

}  // namespace detail

/// CPS distance-to-boundary estimates over epsilon-ball neighborhoods with
/// tangent dimension d. The maximum runs over the closed neighborhood, so the
/// estimate is never negative.
inline CpsDistances cps_distances(const NeighborIndex& index, double epsilon, int d) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (d < 1 || static_cast<Index>(d) > index.dim()) throw InvalidArgument("tangent dimension must lie in [1, p]");
  const Index n = index.size();
  const auto& cloud = index.cloud();
  const auto p = static_cast<Eigen::Index>(cloud.dim());
  const auto sets = all_neighbors(index, EpsilonBall{epsilon}, EmptyPolicy::kAllow);

  // Points within epsilon/2, the center included.
  std::vector<double> half_count(n);
  const double h2 = 0.25 * epsilon * epsilon;
  parallel_for(n, [&](Index k) {
    double c = 0.0;
    index.for_each_within(cloud.point(k), h2, [&](Index, double) { c += 1.0; });
    half_count[k] = c;
  });

  const double scale = theory::sphere_volume(d - 1) / d * std::pow(0.5 * epsilon, d);
  RowMatrix v_hat = RowMatrix::Zero(static_cast<Eigen::Index>(n), p);
  std::vector<char> has_dir(n, 0);
  parallel_for(n, [&](Index k) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(p);
    for (Index i : sets[k].indices) v += (cloud.point(i) - cloud.point(k)) / half_count[i];
    v *= scale;
    const double norm = v.norm();
    if (norm > 0.0) {
      v_hat.row(static_cast<Eigen::Index>(k)) = v / norm;
      has_dir[k] = 1;
    }
  });

  CpsDistances out;
  out.tangent_dim = d;
  out.epsilon = epsilon;
  out.d_hat.assign(n, std::numeric_limits<double>::infinity());
  parallel_for(n, [&](Index k) {
    const auto& s = sets[k];
    if (!has_dir[k] || s.empty()) return;
    Matrix g(p, static_cast<Eigen::Index>(s.count()));
    for (Index j = 0; j < s.count(); ++j)
      g.col(static_cast<Eigen::Index>(j)) = (cloud.point(s.indices[j]) - cloud.point(k)).transpose();
    const Matrix u = detail::tangent_basis(g, d);
    const Vector vk = v_hat.row(static_cast<Eigen::Index>(k)).transpose();
    const Vector pvk = u.transpose() * vk;
    double best = 0.0;  // the term of z_k itself
    for (Index j = 0; j < s.count(); ++j) {
      const Index i = s.indices[j];
      const Vector vi = v_hat.row(static_cast<Eigen::Index>(i)).transpose();
      const Vector pvi = u.transpose() * vi;
      // Projected step from the neighbor back to z_k, in tangent coordinates.
      const Vector step = -(u.transpose() * g.col(static_cast<Eigen::Index>(j)));
      Vector dir = pvk;
      if (has_dir[i] && pvi.dot(pvk) > 0.0) dir += 0.5 * (pvi - pvk);
      best = std::max(best, step.dot(dir));
    }
    out.d_hat[k] = best;
  });
  return out;
}

inline BaselineResult cps_detect(const CpsDistances& dists, double r) {
  const auto n = static_cast<Index>(dists.d_hat.size());
  BaselineResult out{"cps", detail::select(n, [&](Index k) { return dists.d_hat[k] < r; }), {}};
  std::vector<double> finite(dists.d_hat);
  for (double& x : finite)
    if (!std::isfinite(x)) x = std::numeric_limits<double>::max();
  out.scores.push_back({"d_hat", std::move(finite)});
  return out;
}

}  // namespace bdlle
