// Compares B_k on a disk with the continuum profile as a function of the
// distance to the boundary, in bins of width epsilon / 4.

#include <iomanip>
#include <iostream>
#include <vector>

#include "bdlle/bdlle.hpp"

int main() {
  bdlle::DatasetSpec spec;
  spec.name = "disk";
  spec.n = 10000;
  spec.seed = 7;
  const auto data = bdlle::sample_dataset(spec);
  const double eps = 0.1;

  bdlle::DetectorSpec s;
  s.epsilon = eps;
  const auto det = bdlle::run_detector(data.cloud, s);
  const auto& B = det.bdlle->B;

  constexpr int kBins = 8;
  std::vector<double> sum(kBins, 0.0);
  std::vector<int> count(kBins, 0);
  for (std::size_t i = 0; i < B.size(); ++i) {
    const int b = static_cast<int>(data.dist_to_boundary[i] / (eps / 4));
    if (b < kBins) {
      sum[b] += B[i];
      ++count[b];
    }
  }
  std::cout << "c = " << det.bdlle->regularizer.c << ", flagged " << det.boundary_indices.size() << " of "
            << data.size() << "\n\n";
  std::cout << "  dist/eps   mean B   bump_B   points\n" << std::fixed << std::setprecision(4);
  for (int b = 0; b < kBins; ++b) {
    const double mid = (b + 0.5) / 4.0;
    std::cout << std::setw(10) << mid << std::setw(9) << (count[b] ? sum[b] / count[b] : 0.0) << std::setw(9)
              << bdlle::theory::bump_B(mid * eps, eps, data.d) << std::setw(9) << count[b] << '\n';
  }
}
