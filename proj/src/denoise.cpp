#include "mmgest/denoise.hpp"

#include <deque>

namespace mmgest {

namespace {

std::vector<std::vector<int>> neighbor_lists(const GestureCloud& c, double d_max) {
  const int n = static_cast<int>(c.points.size());
  const double r2 = d_max * d_max;
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (distance_sq(c.points[static_cast<std::size_t>(i)],
                      c.points[static_cast<std::size_t>(j)]) <= r2) {
        nbrs[static_cast<std::size_t>(i)].push_back(j);
        nbrs[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  return nbrs;
}

}  // namespace

ClusterLabeling dbscan_cluster(const GestureCloud& c, const DenoiseConfig& cfg) {
  cfg.validate();
  if (c.empty()) fail(Errc::empty_cloud, "dbscan_cluster: empty cloud");

  const int n = static_cast<int>(c.points.size());
  const auto nbrs = neighbor_lists(c, cfg.d_max);
  const auto is_core = [&](int i) {
    return static_cast<int>(nbrs[static_cast<std::size_t>(i)].size()) + 1 >= cfg.n_min;
  };

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  ClusterLabeling out;
  out.labels.assign(static_cast<std::size_t>(n), kUnvisited);

  int next_cluster = 0;
  for (int i = 0; i < n; ++i) {
    if (out.labels[static_cast<std::size_t>(i)] != kUnvisited) continue;
    if (!is_core(i)) {
      out.labels[static_cast<std::size_t>(i)] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    out.labels[static_cast<std::size_t>(i)] = cluster;
    int size = 1;
    std::deque<int> frontier(nbrs[static_cast<std::size_t>(i)].begin(),
                             nbrs[static_cast<std::size_t>(i)].end());
    while (!frontier.empty()) {
      const int j = frontier.front();
      frontier.pop_front();
      int& lab = out.labels[static_cast<std::size_t>(j)];
      if (lab == kNoise) {  // border point reclaimed by the first reaching core
        lab = cluster;
        ++size;
        continue;
      }
      if (lab != kUnvisited) continue;
      lab = cluster;
      ++size;
      if (is_core(j)) {
        frontier.insert(frontier.end(), nbrs[static_cast<std::size_t>(j)].begin(),
                        nbrs[static_cast<std::size_t>(j)].end());
      }
    }
    out.cluster_sizes.push_back(size);
  }
  return out;
}

GestureCloud keep_main_cluster(const GestureCloud& c, const DenoiseConfig& cfg) {
  const ClusterLabeling labeling = dbscan_cluster(c, cfg);
  if (labeling.cluster_sizes.empty())
    fail(Errc::no_cluster, "keep_main_cluster: no cluster of size >= n_min");

  int best = 0;
  for (int k = 1; k < labeling.cluster_count(); ++k)
    if (labeling.cluster_sizes[static_cast<std::size_t>(k)] >
        labeling.cluster_sizes[static_cast<std::size_t>(best)])
      best = k;

  GestureCloud out;
  out.start_frame = c.start_frame;
  out.end_frame = c.end_frame;
  out.source = c.source;
  out.points.reserve(
      static_cast<std::size_t>(labeling.cluster_sizes[static_cast<std::size_t>(best)]));
  for (std::size_t i = 0; i < c.points.size(); ++i)
    if (labeling.labels[i] == best) out.points.push_back(c.points[i]);
  return out;
}

}  // namespace mmgest
