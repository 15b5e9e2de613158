#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "bdlle/indicator.hpp"
#include "test_support.hpp"

using namespace bdlle;

namespace {

LocalDataMatrix make_g(const Matrix& cols) { return {0, cols}; }

Matrix random_g(Eigen::Index p, Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Matrix m(p, n);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(gen);
  return m;
}

// B from the definition: dense solve of (G^T G + c I) y = 1.
double dense_indicator(const Matrix& g, double c) {
  const Eigen::Index n = g.cols();
  const Matrix a = g.transpose() * g + c * Matrix::Identity(n, n);
  const Vector y = a.ldlt().solve(Vector::Ones(n));
  return (static_cast<double>(n) - c * y.sum()) / static_cast<double>(n);
}

}  // namespace

TEST(LocalData, ColumnsAreDifferences) {
  RowMatrix m(3, 2);
  m << 0, 0, 1, 0, -1, 0;
  const PointCloud c(m);
  const NeighborIndex idx(c);
  const auto g = local_data_matrix(c, idx.epsilon_neighbors(0, 1.0));
  ASSERT_EQ(g.count(), 2u);
  EXPECT_EQ(g.columns.col(0), (Vector(2) << 1, 0).finished());
  EXPECT_EQ(g.columns.col(1), (Vector(2) << -1, 0).finished());

  const auto rc = testutil::random_cloud(100, 4, 2);
  const NeighborIndex ri(rc);
  for (Index k = 0; k < 100; k += 10) {
    const auto s = ri.knn_neighbors(k, 8);
    const auto gk = local_data_matrix(rc, s);
    for (Index j = 0; j < s.count(); ++j) {
      for (Eigen::Index r = 0; r < 4; ++r) {
        EXPECT_EQ(gk.columns(r, static_cast<Eigen::Index>(j)),
                  rc.points()(static_cast<Eigen::Index>(s.indices[j]), r) - rc.points()(static_cast<Eigen::Index>(k), r));
      }
    }
  }
  NeighborSet empty;
  EXPECT_THROW(local_data_matrix(rc, empty), EmptyNeighborhood);
}

TEST(LocalSpectrum, SimpleCases) {
  Matrix g(3, 2);
  g << 1, -1, 0, 0, 0, 0;
  const auto s = local_covariance_spectrum(make_g(g));
  EXPECT_NEAR(s.eigenvalues[0], 2.0, 1e-15);
  EXPECT_EQ(s.eigenvalues[1], 0.0);
  EXPECT_EQ(s.eigenvalues[2], 0.0);
  EXPECT_EQ(s.rank, 1u);
  Matrix h(1, 1);
  h << 0.3;
  EXPECT_NEAR(local_covariance_spectrum(make_g(h)).eigenvalues[0], 0.09, 1e-16);
}

TEST(LocalSpectrum, MatchesDenseEigensolve) {
  std::mt19937_64 gen(11);
  for (auto [p, n] : {std::pair{5, 8}, std::pair{8, 5}, std::pair{40, 6}, std::pair{3, 50}}) {
    const Matrix g = random_g(p, n, gen);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g * g.transpose());
    const Vector want = es.eigenvalues().reverse();
    for (bool vectors : {false, true}) {
      const auto s = local_covariance_spectrum(make_g(g), vectors);
      ASSERT_EQ(s.eigenvalues.size(), p);
      for (Eigen::Index i = 0; i < p; ++i) EXPECT_NEAR(s.eigenvalues[i], want[i], 1e-10 * want[0]);
      EXPECT_EQ(s.rank, static_cast<Index>(std::min(p, n)));
    }
  }
}

TEST(PseudoInverse, HandEvaluation) {
  LocalSpectrum s;
  s.eigenvalues = (Vector(2) << 2.0, 0.0).finished();
  s.rank = 1;
  const double a = std::sqrt(0.5);
  s.eigenvectors = (Matrix(2, 2) << a, -a, a, a).finished();
  const Matrix pi = regularized_pseudo_inverse(s, 1.0);
  const Matrix want = (*s.eigenvectors) * (Vector(2) << 1.0 / 3.0, 0.0).finished().asDiagonal() * s.eigenvectors->transpose();
  EXPECT_TRUE(pi.isApprox(want, 1e-14));
  EXPECT_LT(regularized_pseudo_inverse(s, 1e12).cwiseAbs().maxCoeff(), 1e-11);
  s.eigenvectors.reset();
  EXPECT_THROW(regularized_pseudo_inverse(s, 1.0), InvalidArgument);
}

TEST(PseudoInverse, RankThreeReconstruction) {
  std::mt19937_64 gen(4);
  const Matrix g = random_g(6, 3, gen);
  const auto s = local_covariance_spectrum(make_g(g), true);
  ASSERT_EQ(s.rank, 3u);
  const Matrix pi = regularized_pseudo_inverse(s, 0.1);
  EXPECT_LT((pi - pi.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Matrix want = Matrix::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    const Vector u = s.eigenvectors->col(i);
    want += u * u.transpose() / (s.eigenvalues[i] + 0.1);
  }
  EXPECT_LT((pi - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Indicator, SymmetricPairVanishes) {
  Matrix g(2, 2);
  g << 1, -1, 0, 0;
  EXPECT_EQ(boundary_indicator_at(make_g(g), 0.5), 0.0);
}

TEST(Indicator, SingleNeighbor) {
  for (double h : {1.0, 0.2, 3.0}) {
    for (double c : {1.0, 0.01, 7.0}) {
      Matrix g(1, 1);
      g << h;
      EXPECT_NEAR(boundary_indicator_at(make_g(g), c), h * h / (h * h + c), 1e-15);
    }
  }
  Matrix g(1, 1);
  g << 1.0;
  EXPECT_DOUBLE_EQ(boundary_indicator_at(make_g(g), 1.0), 0.5);
}

TEST(Indicator, LargeRegularizerLimit) {
  std::mt19937_64 gen(1);
  const Matrix g = random_g(3, 10, gen);
  EXPECT_LT(boundary_indicator_at(make_g(g), 1e12), 1e-10);
}

TEST(Indicator, ThreeFormulasAgree) {
  std::mt19937_64 gen(21);
  std::uniform_int_distribution<int> pick_p(1, 10), pick_n(1, 50);
  std::uniform_real_distribution<double> logc(-3.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Matrix g = random_g(pick_p(gen), pick_n(gen), gen);
    g.array() += 0.3;  // keep G 1 away from zero
    const Vector g1 = g.rowwise().sum();
    const double lam1 = (g * g.transpose()).eval().selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
    const double c = std::max(std::pow(10.0, logc(gen)), 1e-8 * lam1);
    const double b = boundary_indicator_at(make_g(g), c);
    EXPECT_NEAR(b, boundary_indicator_via_pseudo_inverse(make_g(g), c), 1e-8 * b);
    EXPECT_NEAR(b, dense_indicator(g, c), 1e-8 * std::max(b, 1e-3));
  }
}

TEST(Indicator, RangeAndMonotoneInRegularizer) {
  std::mt19937_64 gen(8);
  for (int i = 0; i < 50; ++i) {
    Matrix g = random_g(3, 12, gen);
    g.row(0).array() += 1.0;
    double prev = 1.0;
    for (double c = 1e-4; c < 1e4; c *= 3) {
      const double b = boundary_indicator_at(make_g(g), c);
      EXPECT_GE(b, -1e-10);
      EXPECT_LT(b, 1.0 + 1e-10);
      EXPECT_LT(b, prev);
      prev = b;
    }
  }
}

TEST(Indicator, RejectsNonPositiveRegularizer) {
  Matrix g(1, 1);
  g << 1.0;
  EXPECT_THROW(boundary_indicator_at(make_g(g), 0.0), InvalidArgument);
  EXPECT_THROW(barycentric_weights(make_g(g), -1.0), InvalidArgument);
}

TEST(Barycentric, WeightsSumToOne) {
  Matrix g(2, 2);
  g << 1, -1, 0, 0;
  const auto w = barycentric_weights(make_g(g), 0.3).w;
  EXPECT_NEAR(w[0], 0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
  Matrix h(1, 1);
  h << 2.0;
  EXPECT_NEAR(barycentric_weights(make_g(h), 0.3).w[0], 1.0, 1e-15);

  std::mt19937_64 gen(2);
  for (int i = 0; i < 20; ++i) {
    const Matrix r = random_g(4, 9, gen);
    const auto sol = barycentric_weights(make_g(r), 0.01);
    const Matrix a = r.transpose() * r + 0.01 * Matrix::Identity(9, 9);
    const Vector y = a.ldlt().solve(Vector::Ones(9));
    EXPECT_TRUE(sol.y.isApprox(y, 1e-9));
    EXPECT_TRUE(sol.w.isApprox(y / y.sum(), 1e-9));
    EXPECT_NEAR(sol.w.sum(), 1.0, 1e-12);
  }
}

TEST(Regularizer, HandBuiltSpectra) {
  const std::size_t n = 50;
  SpectrumSummary s;
  s.lambda_d.assign(n, 1.0 / n);
  s.lambda_d1.assign(n, 0.0);
  s.d1_nonzero.assign(n, 0);
  auto r = select_regularizer(s, 2, 3, 0.5);
  EXPECT_EQ(r.kind, RegularizerKind::kDNonzero);
  EXPECT_NEAR(r.c, 0.01 / n * 1.0, 1e-15);

  s.lambda_d1[7] = 0.25;
  s.d1_nonzero[7] = 1;
  r = select_regularizer(s, 2, 3, 0.5);
  EXPECT_EQ(r.kind, RegularizerKind::kSpectralGap);
  EXPECT_NEAR(r.c, std::sqrt(1.0 * 0.25) / n, 1e-15);

  // d == p always takes the second branch.
  r = select_regularizer(s, 2, 2, 0.5);
  EXPECT_EQ(r.kind, RegularizerKind::kDNonzero);

  // The multiplier must stay below the scheme scale.
  r = select_regularizer(s, 2, 2, 0.008);
  EXPECT_NEAR(r.c, 0.004 / n, 1e-15);

  s.lambda_d.assign(n, 0.0);
  EXPECT_THROW(select_regularizer(s, 2, 2, 0.5), NumericalError);
}

TEST(Regularizer, FlatAndCurvedClouds) {
  const auto [disk, dist] = testutil::uniform_disk(800, 3);
  const NeighborIndex di(disk);
  DetectOptions opt;
  const auto nb = all_neighbors(di, EpsilonBall{0.2});
  const auto flat = resolve_regularizer(disk, nb, EpsilonBall{0.2}, opt);
  EXPECT_EQ(flat.kind, RegularizerKind::kDNonzero);
  double sum2 = 0.0;
  for (const auto& s : nb) sum2 += local_covariance_spectrum(local_data_matrix(disk, s)).lambda(2);
  EXPECT_NEAR(flat.c, sum2 / (100.0 * 800.0), 1e-12 * flat.c);

  RowMatrix bowl(800, 3);
  bowl.leftCols(2) = disk.points();
  bowl.col(2) = disk.points().rowwise().squaredNorm();
  const PointCloud curved(bowl);
  const NeighborIndex ci(curved);
  const auto cn = all_neighbors(ci, EpsilonBall{0.2});
  EXPECT_EQ(resolve_regularizer(curved, cn, EpsilonBall{0.2}, opt).kind, RegularizerKind::kSpectralGap);

  opt.regularizer.mode = RegularizerSpec::Mode::kTheoretical;
  EXPECT_NEAR(resolve_regularizer(curved, cn, EpsilonBall{0.2}, opt).c, 800 * std::pow(0.2, 5), 1e-12);
  EXPECT_NEAR(theoretical_regularizer(Knn{8}, 800, 2), 800 * std::pow(0.01, 2.5), 1e-12);
}

TEST(ScaleSelection, SelectK) {
  EXPECT_EQ(select_K(4000, 2), 64u);
  EXPECT_EQ(select_K(1, 2), 1u);
  EXPECT_EQ(select_K(10000, 3), 40u);
  EXPECT_EQ(select_K(10000, 2), 100u);
  EXPECT_EQ(select_K(5, 1), 3u);
}

TEST(ScaleSelection, EpsilonRange) {
  RowMatrix circle(60, 2);
  for (int i = 0; i < 60; ++i) {
    circle(i, 0) = std::cos(2 * M_PI * i / 60);
    circle(i, 1) = std::sin(2 * M_PI * i / 60);
  }
  const PointCloud cc(circle);
  const auto r = select_epsilon_range(NeighborIndex(cc), 1);
  EXPECT_NEAR(r.min, r.max, 1e-12);

  const auto rc = testutil::random_cloud(301, 2, 9);
  const auto er = select_epsilon_range(NeighborIndex(rc), 2);
  std::vector<double> kd;
  for (Index k = 0; k < rc.size(); ++k) kd.push_back(std::sqrt(testutil::brute_scan(rc, k)[er.k - 1].first));
  EXPECT_EQ(er.k, select_K(301, 2));
  EXPECT_DOUBLE_EQ(er.min, testutil::median_of(kd));
  EXPECT_DOUBLE_EQ(er.max, *std::max_element(kd.begin(), kd.end()));
  EXPECT_DOUBLE_EQ(er.midpoint(), 0.5 * (er.min + er.max));
}

TEST(Detect, GridSegmentEndpoints) {
  RowMatrix m(41, 1);
  for (int i = 0; i < 41; ++i) m(i, 0) = 0.025 * i;
  const PointCloud c(m);
  const NeighborIndex idx(c);
  DetectOptions opt;
  opt.d = 1;
  const auto rep = detect_boundary(idx, EpsilonBall{1.5 * 0.025}, opt);
  EXPECT_EQ(rep.boundary_indices, (std::vector<Index>{0, 40}));
  // Brute-force recomputation of every B_k with the same regularizer.
  for (Index k = 0; k < 41; ++k) {
    std::vector<double> cols;
    for (Index j = 0; j < 41; ++j) {
      const double dlt = m(static_cast<Eigen::Index>(j), 0) - m(static_cast<Eigen::Index>(k), 0);
      if (j != k && std::abs(dlt) <= 1.5 * 0.025) cols.push_back(dlt);
    }
    const Matrix g = Eigen::Map<Matrix>(cols.data(), 1, static_cast<Eigen::Index>(cols.size()));
    EXPECT_NEAR(rep.B[k], dense_indicator(g, rep.regularizer.c), 1e-12);
  }
}

TEST(Detect, ClosedCurveFlagsEveryPoint) {
  RowMatrix circle(200, 2);
  for (int i = 0; i < 200; ++i) {
    circle(i, 0) = std::cos(2 * M_PI * i / 200);
    circle(i, 1) = std::sin(2 * M_PI * i / 200);
  }
  const PointCloud c(circle);
  DetectOptions opt;
  opt.d = 1;
  const auto rep = detect_boundary(NeighborIndex(c), EpsilonBall{0.1}, opt);
  // Every neighborhood is congruent, so B_k is the same everywhere and the
  // relative threshold keeps all points.
  const auto [lo, hi] = std::minmax_element(rep.B.begin(), rep.B.end());
  EXPECT_NEAR(*lo, *hi, 1e-9 * *hi);
  EXPECT_EQ(rep.boundary_indices.size(), 200u);
}

TEST(Detect, PropagatesEmptyNeighborhood) {
  RowMatrix m(3, 1);
  m << 0, 0.1, 5;
  const PointCloud c(m);
  try {
    detect_boundary(NeighborIndex(c), EpsilonBall{0.5});
    FAIL();
  } catch (const EmptyNeighborhood& e) {
    EXPECT_EQ(e.index(), 2u);
  }
}

TEST(Detect, RigidMotionInvariance) {
  const auto [disk, dist] = testutil::uniform_disk(600, 5);
  RowMatrix lifted = RowMatrix::Zero(600, 4);
  lifted.leftCols(2) = disk.points();
  const PointCloud base(lifted);
  DetectOptions opt;
  opt.regularizer.mode = RegularizerSpec::Mode::kExplicit;
  opt.regularizer.value = 1e-3;
  const auto ref = detect_boundary(NeighborIndex(base), EpsilonBall{0.2}, opt);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix q = testutil::random_rotation(4, 100 + trial);
    RowMatrix moved = (lifted * q.transpose()).rowwise() + Eigen::RowVectorXd::Constant(4, 3.0 * trial - 1.0);
    const PointCloud mc(moved);
    const auto rep = detect_boundary(NeighborIndex(mc), EpsilonBall{0.2}, opt);
    for (Index k = 0; k < 600; ++k) EXPECT_NEAR(rep.B[k], ref.B[k], 1e-8);
  }
}

TEST(Detect, IndependentOfWorkerCount) {
  const auto [disk, dist] = testutil::uniform_disk(1500, 6);
  const NeighborIndex idx(disk);
  setenv("BDLLE_NUM_THREADS", "1", 1);
  const auto a = detect_boundary(idx, Knn{30});
  setenv("BDLLE_NUM_THREADS", "4", 1);
  const auto b = detect_boundary(idx, Knn{30});
  unsetenv("BDLLE_NUM_THREADS");
  EXPECT_EQ(a.B, b.B);
  EXPECT_EQ(a.boundary_indices, b.boundary_indices);
  EXPECT_EQ(a.regularizer.c, b.regularizer.c);
}

TEST(Detect, DimensionDiagnostic) {
  const auto [disk, dist] = testutil::uniform_disk(800, 3);
  RowMatrix bowl(800, 3);
  bowl.leftCols(2) = disk.points();
  bowl.col(2) = 0.1 * disk.points().rowwise().squaredNorm();
  const PointCloud c(bowl);
  const NeighborIndex idx(c);
  EXPECT_EQ(estimate_intrinsic_dimension(c, all_neighbors(idx, Knn{20})), 2);
}
