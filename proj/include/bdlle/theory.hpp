#pragma once

// Closed-form moment functions of a ball cut by a half-space, and the
// quantities built from them (bump function, V/U volumes, eigenvalue and
// density predictions). Used as oracles by the test suites.

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <utility>

#include "bdlle/errors.hpp"

namespace bdlle::theory {

/// |S^m| = 2 pi^{(m+1)/2} / Gamma((m+1)/2).
inline double sphere_volume(int m) {
  if (m < 0) throw InvalidArgument("sphere dimension must be >= 0");
  const double h = 0.5 * (m + 1);
  return 2.0 * std::pow(boost::math::constants::pi<double>(), h) / boost::math::tgamma(h);
}

struct SigmaArgs {
  double t = 0.0;
  double epsilon = 1.0;
  int d = 1;
};

namespace detail {

inline void check(const SigmaArgs& a) {
  if (!(a.t >= 0.0)) throw InvalidArgument("t must be >= 0");
  if (!(a.epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (a.d < 1) throw InvalidArgument("d must be >= 1");
}

/// |S^{d-2}|/(d-1), taken to be 1 when d = 1.
inline double ratio(int d) { return d == 1 ? 1.0 : sphere_volume(d - 2) / (d - 1); }

/// |S^{d-2}|/(d^2-1) = ratio(d)/(d+1).
inline double ratio_sq(int d) { return ratio(d) / (d + 1); }

template <class F>
double integrate(F f, double upper) {
  if (upper <= 0.0) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 15, 1e-12);
}

}  // namespace detail

inline double sigma0(const SigmaArgs& a) {
  detail::check(a);
  const int d = a.d;
  const double full = sphere_volume(d - 1) / d;
  if (a.t > a.epsilon) return full;
  const double e = 0.5 * (d - 1);
  return 0.5 * full +
         detail::ratio(d) * detail::integrate([e](double x) { return std::pow(1.0 - x * x, e); }, a.t / a.epsilon);
}

inline double sigma1d(const SigmaArgs& a) {
  detail::check(a);
  if (a.t > a.epsilon) return 0.0;
  const double x = a.t / a.epsilon;
  return -detail::ratio_sq(a.d) * std::pow(1.0 - x * x, 0.5 * (a.d + 1));
}

inline double sigma2(const SigmaArgs& a) {
  detail::check(a);
  const int d = a.d;
  const double full = sphere_volume(d - 1) / (d * (d + 2.0));
  if (a.t > a.epsilon) return full;
  const double e = 0.5 * (d + 1);
  return 0.5 * full +
         detail::ratio_sq(d) * detail::integrate([e](double x) { return std::pow(1.0 - x * x, e); }, a.t / a.epsilon);
}

inline double sigma2d(const SigmaArgs& a) {
  detail::check(a);
  const int d = a.d;
  const double full = sphere_volume(d - 1) / (d * (d + 2.0));
  if (a.t > a.epsilon) return full;
  const double e = 0.5 * (d - 1);
  return 0.5 * full + detail::ratio(d) * detail::integrate(
                                             [e](double x) { return std::pow(1.0 - x * x, e) * x * x; }, a.t / a.epsilon);
}

inline double sigma3(const SigmaArgs& a) {
  detail::check(a);
  if (a.t > a.epsilon) return 0.0;
  const double x = a.t / a.epsilon;
  return -detail::ratio_sq(a.d) / (a.d + 3.0) * std::pow(1.0 - x * x, 0.5 * (a.d + 3));
}

inline double sigma3d(const SigmaArgs& a) {
  detail::check(a);
  if (a.t > a.epsilon) return 0.0;
  const double x = a.t / a.epsilon;
  return -detail::ratio_sq(a.d) / (a.d + 3.0) * (2.0 + (a.d + 1.0) * x * x) * std::pow(1.0 - x * x, 0.5 * (a.d + 1));
}

/// Limit profile of the boundary indicator at distance t from the boundary.
inline double bump_B(double t, double epsilon, int d) {
  const SigmaArgs a{t, epsilon, d};
  const double s1 = sigma1d(a);
  if (s1 == 0.0) return 0.0;
  return s1 * s1 / (sigma0(a) * sigma2d(a));
}

/// Value of the bump function on the boundary itself.
inline double boundary_constant(int d) {
  if (d < 1) throw InvalidArgument("d must be >= 1");
  const double r = detail::ratio_sq(d);  // |S^{d-2}|/(d^2-1)
  const double s = sphere_volume(d - 1);
  return 4.0 * d * d * (d + 2.0) * r * r / (s * s);
}

/// Volume of the part of the radius-r ball lying below a hyperplane at
/// distance t from its center.
inline double volume_V(double t, double r, int d) {
  if (!(t >= 0.0) || !(r >= 0.0)) throw InvalidArgument("t and r must be >= 0");
  if (r == 0.0) return 0.0;
  return sigma0({t, r, d}) * std::pow(r, d);
}

/// Inverse of r -> V(t, r).
inline double inverse_U(double t, double s, int d) {
  if (!(s >= 0.0)) throw InvalidArgument("s must be >= 0");
  if (s == 0.0) return 0.0;
  const double sd = sphere_volume(d - 1);
  if (s < sd * std::pow(t, d) / d) return std::pow(d * s / sd, 1.0 / d);
  double lo = 0.0;
  double hi = std::max(t, std::pow(2.0 * d * s / sd, 1.0 / d)) + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (volume_V(t, mid, d) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Predicted K-distance at distance t from the boundary under density P.
inline double r_tilde(double t, long K, long n, double P, int d) {
  if (!(P > 0.0)) throw InvalidArgument("density must be > 0");
  return inverse_U(t, (K + 1.0) / (P * static_cast<double>(n)), d);
}

/// Leading-order lambda/n in the epsilon-ball scheme: the first d-1 tangent
/// directions and the direction normal to the boundary.
inline std::pair<double, double> predict_eigs_eps(double P, double t, double epsilon, int d) {
  const SigmaArgs a{t, epsilon, d};
  const double scale = P * std::pow(epsilon, d + 2);
  return {scale * sigma2(a), scale * sigma2d(a)};
}

/// Leading-order lambda/n of each tangent direction in the KNN scheme at an
/// interior point.
inline double predict_eig_knn_interior(double P, long K, long n, int d) {
  const double sd = sphere_volume(d - 1);
  return 1.0 / (d + 2.0) * std::pow(d / (sd * P), 2.0 / d) *
         std::pow((K + 1.0) / static_cast<double>(n), (d + 2.0) / d);
}

/// Boundary-corrected 0-1 kernel density estimate.
inline double kde_value(double count, long n, double epsilon, double t, int d) {
  return count / (static_cast<double>(n) * std::pow(epsilon, d) * sigma0({t, epsilon, d}));
}

}  // namespace bdlle::theory
