#pragma once

#include <vector>

#include "mmgest/types.hpp"

namespace mmgest {

struct DenoiseConfig {
  double d_max = 1.0;  // neighborhood radius, meters
  int n_min = 4;       // minimum cluster population, the point itself included

  void validate() const {
    if (!(d_max > 0.0)) fail(Errc::bad_config, "denoise: d_max must be > 0");
    if (n_min < 1) fail(Errc::bad_config, "denoise: n_min must be >= 1");
  }
};

struct ClusterLabeling {
  std::vector<int> labels;        // -1 noise, else 0..K-1
  std::vector<int> cluster_sizes; // size K

  int cluster_count() const { return static_cast<int>(cluster_sizes.size()); }
};

// Density clustering on (x,y,z). A core point has >= n_min points (itself
// included) within d_max; clusters are the density-reachable closures of core
// points. Points are scanned and expanded in input index order, so border
// points attach to the first core point that reaches them and labelings are
// reproducible.
ClusterLabeling dbscan_cluster(const GestureCloud& c, const DenoiseConfig& cfg);

// Keep only the largest cluster (ties: lowest label); noise is dropped.
// Throws no_cluster when nothing reaches n_min.
GestureCloud keep_main_cluster(const GestureCloud& c, const DenoiseConfig& cfg);

}  // namespace mmgest
