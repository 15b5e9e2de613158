// Detects the boundary of a uniformly sampled unit disk with BD-LLE and every
// baseline, then prints F1_max for each detector.
//
//   disk_boundary [n] [seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "bdlle/bdlle.hpp"

int main(int argc, char** argv) {
  bdlle::DatasetSpec spec;
  spec.name = "disk";
  spec.n = argc > 1 ? std::atol(argv[1]) : 4000;
  spec.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

  const bdlle::DatasetBundle data = bdlle::sample_dataset(spec);
  const bdlle::NeighborIndex index(data.cloud);
  const auto grid = bdlle::radius_grid();
  const bdlle::Index k = bdlle::select_K(data.size(), data.d);

  std::cout << "disk, n = " << data.size() << ", K = " << k << "\n\n";
  std::cout << std::left << std::setw(10) << "detector" << std::right << std::setw(10) << "flagged" << std::setw(10)
            << "F1_max" << std::setw(8) << "r*" << '\n';
  for (bdlle::Algorithm a : bdlle::all_algorithms()) {
    bdlle::DetectorSpec s;
    s.algorithm = a;
    s.d = data.d;
    if (bdlle::uses_epsilon(a) && a != bdlle::Algorithm::kBdlle) s.epsilon = 0.1;
    else if (a != bdlle::Algorithm::kBdlle) s.k = k;
    if (a == bdlle::Algorithm::kCps) s.cps_radius = 0.05;
    const bdlle::Detection det = bdlle::run_detector(index, s);
    const bdlle::F1Report rep = bdlle::score(det, data.dist_to_boundary, grid);
    std::cout << std::left << std::setw(10) << det.detector << std::right << std::setw(10)
              << det.boundary_indices.size() << std::setw(10) << std::fixed << std::setprecision(4) << rep.f1_max
              << std::setw(8) << std::setprecision(2) << rep.best_r << '\n';
  }
}
