#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "bdlle/errors.hpp"
#include "bdlle/neighbors.hpp"
#include "bdlle/point_cloud.hpp"

namespace bdlle {

struct GeodesicGraph {
  /// Coordinates used to find graph edges (ambient or parameter space).
  RowMatrix search;
  /// Coordinates whose chord lengths weight the edges; same row count.
  RowMatrix metric;
  /// Rows that are boundary nodes (distance 0 sources).
  std::vector<Index> sources;
};

struct GeodesicOptions {
  double radius = 0.1;
  int attempts = 3;
};

/// Multi-source shortest-path distance from the boundary nodes to rows
/// [0, targets) of the graph. Edges join nodes whose search coordinates lie
/// within the connectivity radius. If some target is unreachable the radius
/// is doubled; after `attempts` tries a NumericalError is raised.
inline std::vector<double> graph_geodesic_distance(const GeodesicGraph& g, Index targets,
                                                   const GeodesicOptions& opt = {}) {
  const auto rows = static_cast<Index>(g.search.rows());
  if (static_cast<Index>(g.metric.rows()) != rows) throw InvalidArgument("search and metric row counts differ");
  if (targets > rows) throw InvalidArgument("more targets than graph nodes");
  if (g.sources.empty()) throw InvalidArgument("no boundary nodes");
  const PointCloud cloud(g.search);
  const NeighborIndex index(cloud);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  double radius = opt.radius;
  for (int attempt = 0; attempt < opt.attempts; ++attempt, radius *= 2.0) {
    std::vector<double> dist(rows, kInf);
    std::vector<char> done(rows, 0);
    using Entry = std::pair<double, Index>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (Index s : g.sources) {
      dist[s] = 0.0;
      heap.emplace(0.0, s);
    }
    const double r2 = radius * radius;
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = 1;
      const auto mu = g.metric.row(static_cast<Eigen::Index>(u));
      index.for_each_within(cloud.point(u), r2, [&](Index v, double) {
        if (done[v]) return;
        const double w = std::sqrt(squared_distance(mu, g.metric.row(static_cast<Eigen::Index>(v))));
        if (du + w < dist[v]) {
          dist[v] = du + w;
          heap.emplace(dist[v], v);
        }
      });
    }
    bool complete = true;
    for (Index i = 0; i < targets && complete; ++i) complete = std::isfinite(dist[i]);
    if (complete) {
      dist.resize(targets);
      return dist;
    }
  }
  throw NumericalError("geodesic graph stays disconnected after " + std::to_string(opt.attempts) + " attempts");
}

}  // namespace bdlle
