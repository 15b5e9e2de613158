#pragma once

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "bdlle/errors.hpp"
#include "bdlle/parallel.hpp"
#include "bdlle/point_cloud.hpp"

namespace bdlle {

struct DmParams {
  double epsilon_dm = 0.2;
  Index ell = 3;
  Index n_max = 0;  ///< 0 keeps every point; otherwise the first n_max rows are embedded
  bool self_affinity = false;  ///< keep k(z_i, z_i) = 1 on the kernel diagonal

  bool operator==(const DmParams&) const = default;
};

struct DmEmbedding {
  RowMatrix coords;    ///< n x ell, row i = (V_1(i), ..., V_ell(i))
  Vector eigenvalues;  ///< lambda_0 .. lambda_ell, ascending
  Matrix vectors;      ///< n x (ell + 1), unit-norm eigenvectors V_0 .. V_ell
};

inline void validate(const DmParams& p, Index n) {
  if (!(p.epsilon_dm > 0.0) || !std::isfinite(p.epsilon_dm)) throw InvalidArgument("epsilon_dm must be a positive number");
  if (p.ell < 1) throw InvalidArgument("embedding dimension must be >= 1");
  if (p.ell + 1 > n) throw InvalidArgument("embedding dimension must be < n");
}

/// Gaussian kernel exp(-|z_i - z_j|^2 / (4 eps^2)), filled symmetrically;
/// zero diagonal unless `self_affinity`.
inline Matrix dm_kernel(const PointCloud& cloud, double epsilon_dm, bool self_affinity = true) {
  const auto n = static_cast<Eigen::Index>(cloud.size());
  const RowMatrix& z = cloud.points();
  const Vector sq = z.rowwise().squaredNorm();
  Matrix gram = z * z.transpose();
  const double scale = -1.0 / (4.0 * epsilon_dm * epsilon_dm);
  Matrix k(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    for (Eigen::Index j = i; j < n; ++j) {
      const double d2 = std::max(0.0, sq[i] + sq[j] - 2.0 * gram(i, j));
      k(i, j) = std::exp(scale * d2);
    }
  });
  k.triangularView<Eigen::StrictlyLower>() = k.transpose();
  if (!self_affinity) k.diagonal().setZero();
  return k;
}

/// The alpha = 1 normalized affinity W = K / (q q^T) with q the kernel row sums.
inline Matrix dm_affinity(const Matrix& kernel) {
  const Vector q = kernel.rowwise().sum();
  if ((q.array() <= 0.0).any()) throw DegenerateNormalization("kernel row sum vanished");
  const Vector inv = q.cwiseInverse();
  return inv.asDiagonal() * kernel * inv.asDiagonal();
}

/// Diffusion-map embedding. Eigenpairs of L = (I - D^{-1} W) / eps^2 come
/// from the symmetric conjugate D^{-1/2} W D^{-1/2}; eigenvectors are mapped
/// back by D^{-1/2}, scaled to unit norm, and signed so that their first
/// nonzero entry is positive.
inline DmEmbedding dm_embed(const PointCloud& input, const DmParams& params) {
  const PointCloud cloud = params.n_max && params.n_max < input.size() ? input.prefix(params.n_max) : input;
  const Index n = cloud.size();
  validate(params, n);
  const Matrix w = dm_affinity(dm_kernel(cloud, params.epsilon_dm, params.self_affinity));
  const Vector deg = w.rowwise().sum();
  if ((deg.array() <= 0.0).any()) throw DegenerateNormalization("degree vanished");
  const Vector isd = deg.cwiseSqrt().cwiseInverse();
  Matrix s = isd.asDiagonal() * w * isd.asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("diffusion-map eigensolve failed");
  const auto m = static_cast<Eigen::Index>(params.ell + 1);
  const auto N = static_cast<Eigen::Index>(n);
  DmEmbedding out;
  out.eigenvalues.resize(m);
  out.vectors.resize(N, m);
  const double e2 = params.epsilon_dm * params.epsilon_dm;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index src = N - 1 - j;  // solver order is ascending in mu
    out.eigenvalues[j] = (1.0 - es.eigenvalues()[src]) / e2;
    Vector v = isd.cwiseProduct(es.eigenvectors().col(src));
    v.normalize();
    const double tol = 1e-12 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < N; ++i) {
      if (std::abs(v[i]) > tol) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    out.vectors.col(j) = v;
  }
  out.coords = out.vectors.rightCols(m - 1);
  return out;
}

}  // namespace bdlle
