#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "bdlle/baselines.hpp"
#include "bdlle/errors.hpp"
#include "bdlle/point_cloud.hpp"

namespace bdlle {

struct F1Report {
  std::string detector;
  std::vector<std::pair<double, double>> per_r;  ///< (r, F1) for every scored radius
  std::vector<double> skipped_r;                 ///< radii whose collar holds every point
  double f1_max = 0.0;
  double best_r = 0.0;
};

/// r_i = step * i for i = 1..k.
inline std::vector<double> radius_grid(Index k = 40, double step = 0.05) {
  if (k < 1) throw InvalidArgument("grid size must be >= 1");
  if (!(step > 0.0)) throw InvalidArgument("grid step must be > 0");
  std::vector<double> g(k);
  for (Index i = 0; i < k; ++i) g[i] = step * static_cast<double>(i + 1);
  return g;
}

namespace detail {

inline std::vector<char> membership(const std::vector<Index>& detected, Index n) {
  std::vector<char> in(n, 0);
  for (Index k : detected) {
    if (k >= n) throw InvalidArgument("detected index " + std::to_string(k) + " out of range");
    in[k] = 1;
  }
  return in;
}

inline double f1_from(const std::vector<char>& in, const std::vector<double>& dist, double r) {
  std::size_t detected = 0, collar = 0, both = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const bool c = dist[i] <= r;
    detected += in[i] != 0;
    collar += c;
    both += c && in[i];
  }
  if (detected + collar == 0) return 0.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(detected + collar);
}

inline bool collar_is_everything(const std::vector<double>& dist, double r) {
  return std::all_of(dist.begin(), dist.end(), [r](double d) { return d <= r; });
}

template <class Detected>
F1Report f1_over_grid(std::string name, const std::vector<double>& dist, const std::vector<double>& grid,
                      Detected&& detected_at) {
  if (grid.empty()) throw InvalidArgument("empty radius grid");
  F1Report rep;
  rep.detector = std::move(name);
  bool any = false;
  for (double r : grid) {
    if (!(r > 0.0)) throw InvalidArgument("radii must be > 0");
    if (collar_is_everything(dist, r)) {
      rep.skipped_r.push_back(r);
      continue;
    }
    const double f = f1_from(detected_at(r), dist, r);
    rep.per_r.emplace_back(r, f);
    if (!any || f > rep.f1_max) {
      rep.f1_max = f;
      rep.best_r = r;
      any = true;
    }
  }
  return rep;
}

}  // namespace detail

/// 2 |detected & C_r| / (|detected| + |C_r|) with collar C_r = {i : dist_i <= r};
/// zero when both sets are empty.
inline double f1(const std::vector<Index>& detected, const std::vector<double>& dist, double r) {
  if (!(r > 0.0)) throw InvalidArgument("radius must be > 0");
  return detail::f1_from(detail::membership(detected, dist.size()), dist, r);
}

/// Best F1 over the grid, ties resolved to the smallest radius. Radii whose
/// collar already contains every point are left out: there any detector that
/// flags everything would score 1.
inline F1Report f1_max(const std::vector<Index>& detected, const std::vector<double>& dist,
                       const std::vector<double>& grid = radius_grid(), std::string name = "") {
  const auto in = detail::membership(detected, dist.size());
  return detail::f1_over_grid(std::move(name), dist, grid, [&](double) -> const std::vector<char>& { return in; });
}

/// CPS variant: at each radius the detected set is {k : d_hat_k < r}.
inline F1Report f1_max_cps(const CpsDistances& cps, const std::vector<double>& dist,
                           const std::vector<double>& grid = radius_grid()) {
  if (cps.d_hat.size() != dist.size()) throw InvalidArgument("CPS estimates and ground truth differ in length");
  std::vector<char> in(dist.size());
  return detail::f1_over_grid("cps", dist, grid, [&](double r) -> const std::vector<char>& {
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = cps.d_hat[i] < r;
    return in;
  });
}

}  // namespace bdlle
