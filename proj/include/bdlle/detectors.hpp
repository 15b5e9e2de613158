#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdlle/baselines.hpp"
#include "bdlle/diffusion.hpp"
#include "bdlle/errors.hpp"
#include "bdlle/eval.hpp"
#include "bdlle/indicator.hpp"
#include "bdlle/neighbors.hpp"

namespace bdlle {

enum class Algorithm { kBdlle, kBorder, kBrim, kBand, kSpinver, kLever, kCps };

inline const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> v{Algorithm::kBdlle, Algorithm::kBand,  Algorithm::kBorder, Algorithm::kBrim,
                                        Algorithm::kCps,   Algorithm::kLever, Algorithm::kSpinver};
  return v;
}

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kBdlle: return "bdlle";
    case Algorithm::kBorder: return "border";
    case Algorithm::kBrim: return "brim";
    case Algorithm::kBand: return "band";
    case Algorithm::kSpinver: return "spinver";
    case Algorithm::kLever: return "lever";
    case Algorithm::kCps: return "cps";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  for (Algorithm a : all_algorithms())
    if (to_string(a) == s) return a;
  throw InvalidArgument("unknown detector '" + s + "'");
}

/// Whether a detector works on epsilon balls (as opposed to KNN sets).
inline bool uses_epsilon(Algorithm a) {
  return a == Algorithm::kBdlle || a == Algorithm::kBrim || a == Algorithm::kCps;
}

/// One detector with its scale. An unset scale is chosen from the data: the
/// midpoint of the epsilon range for ball schemes, select_K for KNN ones.
/// BD-LLE runs on KNN sets when `k` is set and `epsilon` is not.
struct DetectorSpec {
  Algorithm algorithm = Algorithm::kBdlle;
  std::optional<double> epsilon;
  std::optional<Index> k;
  int d = 2;
  RegularizerSpec regularizer{};
  double threshold_frac = 0.5;
  std::optional<double> cps_radius;  ///< CPS only; unset leaves the detected set empty
};

struct Detection {
  std::string detector;
  NeighborParams params;
  std::vector<Index> boundary_indices;
  std::optional<BoundaryReport> bdlle;
  std::optional<BaselineResult> baseline;
  std::optional<CpsDistances> cps;
  std::optional<double> cps_radius;
};

inline NeighborParams resolve_params(const NeighborIndex& index, const DetectorSpec& spec) {
  const bool ball = spec.algorithm == Algorithm::kBdlle ? !(spec.k && !spec.epsilon) : uses_epsilon(spec.algorithm);
  if (ball) {
    const double eps = spec.epsilon ? *spec.epsilon : select_epsilon_range(index, spec.d).midpoint();
    return EpsilonBall{eps};
  }
  return Knn{spec.k ? *spec.k : select_K(index.size(), spec.d)};
}

inline Detection run_detector(const NeighborIndex& index, const DetectorSpec& spec) {
  Detection out;
  out.detector = to_string(spec.algorithm);
  out.params = resolve_params(index, spec);
  validate(out.params, index.size());
  const auto eps = [&] { return std::get<EpsilonBall>(out.params).epsilon; };
  const auto K = [&] { return std::get<Knn>(out.params).k; };
  switch (spec.algorithm) {
    case Algorithm::kBdlle: {
      DetectOptions opt;
      opt.d = spec.d;
      opt.regularizer = spec.regularizer;
      opt.threshold_frac = spec.threshold_frac;
      out.bdlle = detect_boundary(index, out.params, opt);
      out.boundary_indices = out.bdlle->boundary_indices;
      return out;
    }
    case Algorithm::kCps:
      out.cps = cps_distances(index, eps(), spec.d);
      out.cps_radius = spec.cps_radius;
      if (spec.cps_radius) out.boundary_indices = cps_detect(*out.cps, *spec.cps_radius).boundary_indices;
      return out;
    case Algorithm::kBorder: out.baseline = border(index, K()); break;
    case Algorithm::kBrim: out.baseline = brim(index, eps()); break;
    case Algorithm::kBand: out.baseline = band(index, K()); break;
    case Algorithm::kSpinver: out.baseline = spinver(index, K()); break;
    case Algorithm::kLever: out.baseline = lever(index, K()); break;
  }
  out.boundary_indices = out.baseline->boundary_indices;
  return out;
}

inline Detection run_detector(const PointCloud& cloud, const DetectorSpec& spec) {
  const NeighborIndex index(cloud);
  return run_detector(index, spec);
}

/// F1_max of a detection. CPS without a fixed radius is scored per radius from
/// its distance estimates.
inline F1Report score(const Detection& det, const std::vector<double>& dist,
                      const std::vector<double>& grid = radius_grid()) {
  if (det.cps && !det.cps_radius) return f1_max_cps(*det.cps, dist, grid);
  return f1_max(det.boundary_indices, dist, grid, det.detector);
}

struct PipelineResult {
  DmEmbedding embedding;
  Detection detection;  ///< indices refer to rows of the input cloud
};

/// Embeds the cloud by diffusion maps and runs the detector on the embedded
/// coordinates. Row i of the embedding is point i of the input, so detected
/// indices carry over unchanged. With n_max set only the first n_max points
/// take part.
inline PipelineResult denoise_detect(const PointCloud& cloud, const DmParams& dm, const DetectorSpec& spec) {
  PipelineResult r;
  r.embedding = dm_embed(cloud, dm);
  const PointCloud embedded(r.embedding.coords);
  r.detection = run_detector(embedded, spec);
  return r;
}

}  // namespace bdlle
