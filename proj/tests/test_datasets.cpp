#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bdlle/datasets.hpp"
#include "bdlle/geodesic.hpp"
#include "bdlle/rng.hpp"

using namespace bdlle;

namespace {

constexpr double kPi = 3.14159265358979323846;

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  RandomStream a(5, "x"), b(5, "x"), c(5, "y"), d(6, "x");
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    EXPECT_EQ(va, b.next());
    EXPECT_NE(va, c.next());
    EXPECT_NE(va, d.next());
  }
  EXPECT_EQ(a.draws(), 100u);
}

TEST(Rng, KnownFirstOutput) {
  // SplitMix64 reference: mix(golden) for key 0.
  EXPECT_EQ(RandomStream::mix(RandomStream::kGolden), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(RandomStream::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(RandomStream::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, UniformAndNormalMoments) {
  RandomStream rs(1, "moments");
  double s = 0, s2 = 0, lo = 1, hi = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rs.uniform();
    s += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_NEAR(s / n, 0.5, 0.003);
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  s = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rs.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Geodesic, MatchesStraightLineOnSegment) {
  RowMatrix m(101, 1);
  for (int i = 0; i <= 100; ++i) m(i, 0) = 0.01 * i;
  GeodesicGraph g{m, m, {0}};
  const auto d = graph_geodesic_distance(g, 101, {0.015, 3});
  for (int i = 0; i <= 100; ++i) EXPECT_NEAR(d[i], 0.01 * i, 1e-12);
}

TEST(Geodesic, MetricCoordinatesWeightEdges) {
  RowMatrix s(3, 1), m(3, 2);
  s << 0, 1, 2;
  m << 0, 0, 3, 4, 3, 4;
  GeodesicGraph g{s, m, {0}};
  const auto d = graph_geodesic_distance(g, 3, {1.0, 1});
  EXPECT_DOUBLE_EQ(d[1], 5.0);
  EXPECT_DOUBLE_EQ(d[2], 5.0);
}

TEST(Geodesic, RadiusDoublesThenFails) {
  RowMatrix m(2, 1);
  m << 0, 0.3;
  GeodesicGraph g{m, m, {0}};
  EXPECT_NEAR(graph_geodesic_distance(g, 2, {0.1, 3})[1], 0.3, 1e-15);
  EXPECT_THROW(graph_geodesic_distance(g, 2, {0.1, 2}), NumericalError);
}

TEST(Datasets, DiskGroundTruth) {
  const auto b = datasets::sample_disk(3000, 1);
  ASSERT_EQ(b.size(), 3000u);
  EXPECT_EQ(b.cloud.dim(), 2u);
  double inner = 0;
  for (Index i = 0; i < b.size(); ++i) {
    const double r = b.cloud.point(i).norm();
    EXPECT_LE(r, 1.0);
    EXPECT_NEAR(b.dist_to_boundary[i], 1.0 - r, 1e-15);
    EXPECT_NEAR(b.params(static_cast<Eigen::Index>(i), 0), r, 1e-15);
    if (r < 0.5) ++inner;
  }
  EXPECT_NEAR(inner / 3000.0, 0.25, 0.03);
  const auto nu = datasets::sample_disk(3000, 1, datasets::DiskMode::kNonuniform);
  double inner_nu = 0;
  for (Index i = 0; i < nu.size(); ++i) inner_nu += nu.cloud.point(i).norm() < 0.5;
  EXPECT_NEAR(inner_nu / 3000.0, 0.5, 0.03);
}

TEST(Datasets, PrefixProperty) {
  const auto big = datasets::sample_ball(500, 3);
  const auto small = datasets::sample_ball(200, 3);
  EXPECT_EQ(big.cloud.points().topRows(200), small.cloud.points());
  const auto pre = big.prefix(200);
  EXPECT_EQ(pre.dist_to_boundary, small.dist_to_boundary);
}

TEST(Datasets, BallRadialLaw) {
  const auto b = datasets::sample_ball(20000, 2);
  // |x| = sqrt(r) with r uniform, so P(|x| < 0.5) = 0.25.
  double inner = 0;
  for (Index i = 0; i < b.size(); ++i) inner += b.cloud.point(i).norm() < 0.5;
  EXPECT_NEAR(inner / 20000.0, 0.25, 0.01);
  EXPECT_EQ(b.d, 3);
}

TEST(Datasets, TorusHelpers) {
  const auto x = datasets::torus(0.0, 0.0);
  EXPECT_DOUBLE_EQ(x[0], 4.2);
  const auto y = datasets::tilt({1.0, 2.0, 0.0});
  EXPECT_NEAR(y[0], -std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(y[2], std::sqrt(0.5), 1e-15);
  EXPECT_EQ(y[1], 2.0);
}

TEST(Datasets, VcutAvoidsGapAndDistancesAreSane) {
  const auto b = datasets::sample_vcut_torus(1500, 4, {15000, 0.2, 500});
  for (Index i = 0; i < b.size(); ++i) {
    const double phi = b.params(static_cast<Eigen::Index>(i), 1);
    EXPECT_TRUE(phi < -0.5 || phi >= 0.5);
    // Arc along phi at the outermost radius bounds the geodesic from above,
    // the chord to the nearest cut plane from below.
    const double gap = std::min(std::abs(phi - 0.5), std::abs(phi + 0.5));
    const double ring = 3.0 + 1.2 * std::cos(b.params(static_cast<Eigen::Index>(i), 0));
    EXPECT_LE(b.dist_to_boundary[i], ring * gap * 1.1 + 0.2);
    const auto x = b.cloud.point(i);
    const double plane = std::min(std::abs(std::sin(0.5) * x[0] - std::cos(0.5) * x[1]),
                                  std::abs(std::sin(0.5) * x[0] + std::cos(0.5) * x[1]));
    EXPECT_GE(b.dist_to_boundary[i], plane - 1e-9);
  }
}

TEST(Datasets, TcutKeepsBelowLevel) {
  const auto b = datasets::sample_tcut_torus(2000, 5, {15000, 0.2, 500});
  EXPECT_LT(b.size(), 2000u);
  EXPECT_GT(b.size(), 1700u);
  for (Index i = 0; i < b.size(); ++i) {
    EXPECT_LT(b.cloud.point(i)[2], 2.8);
    EXPECT_GE(b.dist_to_boundary[i], 2.8 - b.cloud.point(i)[2] - 1e-9);
  }
  const auto bd = datasets::tcut_boundary(500);
  for (Eigen::Index i = 0; i < bd.rows(); ++i) EXPECT_NEAR(bd(i, 2), 2.8, 1e-9);
}

TEST(Datasets, KleinEmbedding) {
  const auto b = datasets::sample_klein(1000, 6, {10000, 0.15, 500});
  EXPECT_EQ(b.cloud.dim(), 500u);
  EXPECT_EQ(b.cloud.points().rightCols(496).cwiseAbs().maxCoeff(), 0.0);
  for (Index i = 0; i < b.size(); ++i) {
    const double t = b.params(static_cast<Eigen::Index>(i), 0), p = b.params(static_cast<Eigen::Index>(i), 1);
    const double hole = std::hypot(t - kPi, p - kPi);
    EXPECT_GE(hole, 1.0);
    EXPECT_GE(b.dist_to_boundary[i], 0.0);
  }
  // Near-hole points should be near the boundary.
  std::vector<double> near, far;
  for (Index i = 0; i < b.size(); ++i) {
    const double hole = std::hypot(b.params(static_cast<Eigen::Index>(i), 0) - kPi, b.params(static_cast<Eigen::Index>(i), 1) - kPi);
    (hole < 1.1 ? near : far).push_back(b.dist_to_boundary[i]);
  }
  EXPECT_LT(mean(near), mean(far));
}

TEST(Datasets, NoisyDiskShapes) {
  const auto b = datasets::sample_noisy_disk(400, 7, 0.05, {4000, 0.1, 500});
  ASSERT_TRUE(b.clean.has_value());
  EXPECT_EQ(b.cloud.dim(), 500u);
  const RowMatrix diff = b.cloud.points() - b.clean->points();
  const double var = diff.squaredNorm() / static_cast<double>(diff.size());
  EXPECT_NEAR(std::sqrt(var), 0.05, 0.002);
  EXPECT_EQ(b.clean->points().rightCols(475).cwiseAbs().maxCoeff(), 0.0);
  for (Index i = 0; i < b.size(); ++i) {
    // Surface distance is at least the planar distance.
    EXPECT_GE(b.dist_to_boundary[i], b.dist_proxy[i] - 0.02);
  }
  const auto zero = datasets::sample_noisy_disk(50, 7, 0.0, {2000, 0.15, 200});
  EXPECT_EQ(zero.cloud.points(), zero.clean->points());
}

TEST(Datasets, DispatcherAndDefaults) {
  EXPECT_EQ(default_size("disk"), 4000u);
  EXPECT_EQ(default_size("klein"), 9689u);
  EXPECT_THROW(default_size("moon"), InvalidArgument);
  DatasetSpec s;
  s.name = "disk";
  s.n = 10;
  s.seed = 9;
  const auto a = sample_dataset(s);
  const auto b = sample_dataset(s);
  EXPECT_EQ(a.cloud.points(), b.cloud.points());
  s.seed = 10;
  EXPECT_NE(sample_dataset(s).cloud.points(), a.cloud.points());
}
