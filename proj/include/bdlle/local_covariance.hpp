#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <vector>

#include "bdlle/errors.hpp"
#include "bdlle/neighbors.hpp"
#include "bdlle/point_cloud.hpp"

namespace bdlle {

/// Eigenvalues of a local covariance below this fraction of the largest one
/// count as zero.
inline constexpr double kRankTolerance = 1e-12;

/// p x N_k matrix whose j-th column is z_{k,j} - z_k.
struct LocalDataMatrix {
  Index center = 0;
  Matrix columns;

  Index count() const noexcept { return static_cast<Index>(columns.cols()); }
  Index dim() const noexcept { return static_cast<Index>(columns.rows()); }
};

inline LocalDataMatrix local_data_matrix(const PointCloud& cloud, const NeighborSet& nbrs) {
  if (nbrs.empty()) throw EmptyNeighborhood(nbrs.center);
  LocalDataMatrix g;
  g.center = nbrs.center;
  g.columns.resize(static_cast<Eigen::Index>(cloud.dim()), static_cast<Eigen::Index>(nbrs.count()));
  const auto zk = cloud.point(nbrs.center);
  for (Index j = 0; j < nbrs.count(); ++j) {
    g.columns.col(static_cast<Eigen::Index>(j)) = (cloud.point(nbrs.indices[j]) - zk).transpose();
  }
  return g;
}

/// An m x N matrix F with F^T F = G^T G and m <= min(p, N). Rows of G that are
/// identically zero are dropped, and a tall remainder is replaced by the
/// triangular factor of its QR decomposition. Every quantity BD-LLE derives
/// from G depends on G^T G only, so F can stand in for G.
inline Matrix reduced_frame(const Matrix& g) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if ((g.row(i).array() != 0.0).any()) rows.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index n = g.cols();
  Matrix f(m, n);
  for (Eigen::Index i = 0; i < m; ++i) f.row(i) = g.row(rows[static_cast<std::size_t>(i)]);
  if (m <= n) return f;
  Eigen::HouseholderQR<Matrix> qr(f);
  return qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
}

/// Sorted spectrum of C = G G^T.
struct LocalSpectrum {
  Vector eigenvalues;                 ///< length p, descending, >= 0
  Index rank = 0;                     ///< count above kRankTolerance * lambda_1
  std::optional<Matrix> eigenvectors;  ///< p x p, columns match eigenvalues

  /// lambda_i with 1-based i; zero past the end.
  double lambda(Index i) const {
    return i >= 1 && i <= static_cast<Index>(eigenvalues.size()) ? eigenvalues[static_cast<Eigen::Index>(i - 1)] : 0.0;
  }
};

namespace detail {

inline Index numerical_rank(const Vector& ev) {
  if (ev.size() == 0 || !(ev[0] > 0.0)) return 0;
  const double cut = kRankTolerance * ev[0];
  Index r = 0;
  while (r < static_cast<Index>(ev.size()) && ev[static_cast<Eigen::Index>(r)] > cut) ++r;
  return r;
}

}  // namespace detail

/// Eigenvalues of G G^T as squared singular values of G; the p x p product is
/// never formed. With `with_vectors` the full left singular basis is kept.
inline LocalSpectrum local_covariance_spectrum(const LocalDataMatrix& g, bool with_vectors = false) {
  LocalSpectrum s;
  const Eigen::Index p = g.columns.rows();
  s.eigenvalues = Vector::Zero(p);
  if (with_vectors) {
    Eigen::JacobiSVD<Matrix> svd(g.columns, Eigen::ComputeFullU);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD of local data matrix failed");
    const Vector sv = svd.singularValues();
    s.eigenvalues.head(sv.size()) = sv.array().square().matrix();
    s.eigenvectors = svd.matrixU();
  } else {
    const Matrix f = reduced_frame(g.columns);
    if (f.rows() > 0) {
      Eigen::BDCSVD<Matrix> svd(f);
      if (svd.info() != Eigen::Success) throw NumericalError("SVD of local data matrix failed");
      const Vector sv = svd.singularValues();
      s.eigenvalues.head(sv.size()) = sv.array().square().matrix();
    }
  }
  s.rank = detail::numerical_rank(s.eigenvalues);
  return s;
}

/// U I_{p,r} (Lambda + c I)^{-1} U^T.
inline Matrix regularized_pseudo_inverse(const LocalSpectrum& spec, double c) {
  if (!(c > 0.0)) throw InvalidArgument("regularizer must be > 0");
  if (!spec.eigenvectors) throw InvalidArgument("spectrum was computed without eigenvectors");
  const Matrix& u = *spec.eigenvectors;
  const auto r = static_cast<Eigen::Index>(spec.rank);
  const Vector inv = (spec.eigenvalues.head(r).array() + c).inverse().matrix();
  Matrix out = u.leftCols(r) * inv.asDiagonal() * u.leftCols(r).transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace bdlle
