#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <variant>
#include <vector>

#include "bdlle/errors.hpp"
#include "bdlle/point_cloud.hpp"

namespace bdlle {

struct EpsilonBall {
  double epsilon = 0.0;
};

struct Knn {
  Index k = 0;
};

/// Neighbor scheme: epsilon-radius ball or K nearest neighbors (with ties).
using NeighborParams = std::variant<EpsilonBall, Knn>;

inline void validate(const NeighborParams& params, Index n) {
  if (const auto* e = std::get_if<EpsilonBall>(&params)) {
    if (!(e->epsilon > 0.0) || !std::isfinite(e->epsilon)) throw InvalidArgument("epsilon must be positive and finite");
  } else {
    const auto k = std::get<Knn>(params).k;
    if (k < 1 || k + 1 > n) throw InvalidArgument("K must satisfy 1 <= K <= n-1");
  }
}

/// Neighbors of one point, sorted by (distance, index). The center is never
/// included and neither is any point at distance zero from it.
struct NeighborSet {
  Index center = 0;
  std::vector<Index> indices;
  std::vector<double> distances;

  Index count() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
};

enum class EmptyPolicy { kThrow, kAllow };

struct IndexOptions {
  /// Above this many varying coordinates the tree stops pruning well and a
  /// linear scan is used instead.
  Index max_tree_dims = 24;
  Index leaf_size = 16;
};

/// Exact range / k-nearest queries over an immutable cloud. Holds a pointer to
/// the cloud, which must outlive the index. Const queries are thread-safe.
class NeighborIndex {
 public:
  explicit NeighborIndex(const PointCloud& cloud, IndexOptions opts = {}) : cloud_(&cloud), opts_(opts) {
    if (cloud.size() < 1) throw InvalidArgument("cannot index an empty cloud");
    const auto& pts = cloud.points();
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      if (pts.col(j).maxCoeff() > pts.col(j).minCoeff()) active_.push_back(static_cast<int>(j));
    }
    perm_.resize(cloud.size());
    std::iota(perm_.begin(), perm_.end(), Index{0});
    brute_ = active_.size() > opts_.max_tree_dims;
    if (!brute_) {
      nodes_.reserve(2 * cloud.size() / std::max<Index>(1, opts_.leaf_size) + 2);
      build(0, cloud.size());
    }
  }

  Index size() const noexcept { return cloud_->size(); }
  Index dim() const noexcept { return cloud_->dim(); }
  bool uses_linear_scan() const noexcept { return brute_; }
  const PointCloud& cloud() const noexcept { return *cloud_; }

  /// {i != k : 0 < |z_i - z_k| <= epsilon}.
  NeighborSet epsilon_neighbors(Index k, double epsilon, EmptyPolicy policy = EmptyPolicy::kThrow) const {
    check_center(k);
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    NeighborSet out = collect_within(k, epsilon * epsilon);
    if (out.empty() && policy == EmptyPolicy::kThrow) throw EmptyNeighborhood(k);
    return out;
  }

  /// All points with 0 < distance <= K-distance of z_k; ties at the K-distance
  /// are all kept, so count() >= K unless z_k has duplicates.
  NeighborSet knn_neighbors(Index k, Index K) const {
    const double kth = kth_squared(k, K);
    NeighborSet out = collect_within(k, kth);
    out.center = k;
    return out;
  }

  /// Distance from z_k to its K-th nearest other point (duplicates count).
  double k_distance(Index k, Index K) const { return std::sqrt(kth_squared(k, K)); }

  NeighborSet neighbors(Index k, const NeighborParams& params, EmptyPolicy policy = EmptyPolicy::kThrow) const {
    if (const auto* e = std::get_if<EpsilonBall>(&params)) return epsilon_neighbors(k, e->epsilon, policy);
    auto out = knn_neighbors(k, std::get<Knn>(params).k);
    if (out.empty() && policy == EmptyPolicy::kThrow) throw EmptyNeighborhood(k);
    return out;
  }

  /// Visits every point j with squared distance to `q` at most r2 (the center
  /// itself included when q is a cloud point). fn(j, squared_distance).
  template <class Row, class Fn>
  void for_each_within(const Row& q, double r2, Fn&& fn) const {
    if (brute_) {
      for (Index j = 0; j < size(); ++j) {
        const double d2 = squared_distance(q, cloud_->point(j));
        if (d2 <= r2) fn(j, d2);
      }
      return;
    }
    std::vector<Index> stack{0};
    const double prune = r2 * (1.0 + kSlack) + std::numeric_limits<double>::min();
    while (!stack.empty()) {
      const Index ni = stack.back();
      stack.pop_back();
      const Node& node = nodes_[ni];
      if (box_lower_bound(ni, q) > prune) continue;
      if (node.left == kNone) {
        for (Index t = node.begin; t < node.end; ++t) {
          const Index j = perm_[t];
          const double d2 = squared_distance(q, cloud_->point(j));
          if (d2 <= r2) fn(j, d2);
        }
      } else {
        stack.push_back(node.right);
        stack.push_back(node.left);
      }
    }
  }

 private:
  static constexpr Index kNone = std::numeric_limits<Index>::max();
  // Relative rounding allowance between the box bound and the full distance sum.
  static constexpr double kSlack = 1e-12;

  struct Node {
    Index begin = 0;
    Index end = 0;
    Index left = kNone;
    Index right = kNone;
  };

  void check_center(Index k) const {
    if (k >= size()) throw InvalidArgument("point index out of range");
  }

  Index build(Index begin, Index end) {
    const Index id = nodes_.size();
    nodes_.push_back({begin, end, kNone, kNone});
    const Index na = active_.size();
    std::vector<double> lo(na, std::numeric_limits<double>::infinity());
    std::vector<double> hi(na, -std::numeric_limits<double>::infinity());
    const auto& pts = cloud_->points();
    for (Index t = begin; t < end; ++t) {
      for (Index a = 0; a < na; ++a) {
        const double v = pts(static_cast<Eigen::Index>(perm_[t]), active_[a]);
        lo[a] = std::min(lo[a], v);
        hi[a] = std::max(hi[a], v);
      }
    }
    box_lo_.insert(box_lo_.end(), lo.begin(), lo.end());
    box_hi_.insert(box_hi_.end(), hi.begin(), hi.end());
    if (end - begin <= opts_.leaf_size) return id;

    Index best = 0;
    double spread = -1.0;
    for (Index a = 0; a < na; ++a) {
      if (hi[a] - lo[a] > spread) {
        spread = hi[a] - lo[a];
        best = a;
      }
    }
    if (!(spread > 0.0)) return id;  // all points coincide
    const int dim = active_[best];
    const Index mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin), perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                     perm_.begin() + static_cast<std::ptrdiff_t>(end), [&](Index x, Index y) {
                       return pts(static_cast<Eigen::Index>(x), dim) < pts(static_cast<Eigen::Index>(y), dim);
                     });
    const Index left = build(begin, mid);
    const Index right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  template <class Row>
  double box_lower_bound(Index node, const Row& q) const {
    const Index na = active_.size();
    const double* lo = box_lo_.data() + node * na;
    const double* hi = box_hi_.data() + node * na;
    double s = 0.0;
    for (Index a = 0; a < na; ++a) {
      const double v = q[active_[a]];
      const double g = v < lo[a] ? lo[a] - v : (v > hi[a] ? v - hi[a] : 0.0);
      s += g * g;
    }
    return s;
  }

  NeighborSet collect_within(Index k, double r2) const {
    NeighborSet out;
    out.center = k;
    std::vector<std::pair<double, Index>> hits;
    const auto q = cloud_->point(k);
    for_each_within(q, r2, [&](Index j, double d2) {
      if (j != k && d2 > 0.0) hits.emplace_back(d2, j);
    });
    std::sort(hits.begin(), hits.end());
    out.indices.reserve(hits.size());
    out.distances.reserve(hits.size());
    for (const auto& [d2, j] : hits) {
      out.indices.push_back(j);
      out.distances.push_back(std::sqrt(d2));
    }
    return out;
  }

  double kth_squared(Index k, Index K) const {
    check_center(k);
    if (K < 1 || K + 1 > size()) throw InvalidArgument("K must satisfy 1 <= K <= n-1");
    const auto q = cloud_->point(k);
    std::priority_queue<double> heap;  // K smallest squared distances seen so far
    auto offer = [&](Index j, double d2) {
      if (j == k) return;
      if (heap.size() < K) {
        heap.push(d2);
      } else if (d2 < heap.top()) {
        heap.pop();
        heap.push(d2);
      }
    };
    if (brute_) {
      for (Index j = 0; j < size(); ++j) offer(j, squared_distance(q, cloud_->point(j)));
      return heap.top();
    }
    // Best-first descent with a pruning radius that shrinks as the heap fills.
    using Entry = std::pair<double, Index>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    frontier.emplace(box_lower_bound(0, q), 0);
    while (!frontier.empty()) {
      const auto [bound, ni] = frontier.top();
      frontier.pop();
      if (heap.size() == K && bound > heap.top() * (1.0 + kSlack) + std::numeric_limits<double>::min()) break;
      const Node& node = nodes_[ni];
      if (node.left == kNone) {
        for (Index t = node.begin; t < node.end; ++t) {
          const Index j = perm_[t];
          offer(j, squared_distance(q, cloud_->point(j)));
        }
      } else {
        frontier.emplace(box_lower_bound(node.left, q), node.left);
        frontier.emplace(box_lower_bound(node.right, q), node.right);
      }
    }
    return heap.top();
  }

  const PointCloud* cloud_;
  IndexOptions opts_;
  std::vector<int> active_;
  std::vector<Index> perm_;
  std::vector<Node> nodes_;
  std::vector<double> box_lo_;
  std::vector<double> box_hi_;
  bool brute_ = false;
};

/// Neighbor sets for every point of the cloud, computed in parallel.
std::vector<NeighborSet> all_neighbors(const NeighborIndex& index, const NeighborParams& params,
                                       EmptyPolicy policy = EmptyPolicy::kThrow);

}  // namespace bdlle

#include "bdlle/parallel.hpp"

namespace bdlle {

inline std::vector<NeighborSet> all_neighbors(const NeighborIndex& index, const NeighborParams& params,
                                              EmptyPolicy policy) {
  validate(params, index.size());
  std::vector<NeighborSet> out(index.size());
  parallel_for(index.size(), [&](Index k) { out[k] = index.neighbors(k, params, EmptyPolicy::kAllow); });
  if (policy == EmptyPolicy::kThrow) {
    for (Index k = 0; k < out.size(); ++k) {
      if (out[k].empty()) throw EmptyNeighborhood(k);
    }
  }
  return out;
}

}  // namespace bdlle
