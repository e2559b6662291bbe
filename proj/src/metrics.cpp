#include "mmgest/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <tuple>

namespace mmgest {

namespace {

void require_non_empty(const GestureCloud& c, const char* who) {
  if (c.empty()) fail(Errc::empty_cloud, std::string(who) + ": empty cloud");
}

// Directed reductions share one pass: for each p in `from`, the distance to
// its nearest point of `to`. Left-to-right accumulation keeps results
// bit-reproducible.
void directed_nn(const GestureCloud& from, const GestureCloud& to, double& max_out,
                 double& mean_out) {
  double worst = 0.0;
  double sum = 0.0;
  for (const Point& p : from.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : to.points) {
      best = std::min(best, distance_sq(p, q));
    }
    const double d = std::sqrt(best);
    worst = std::max(worst, d);
    sum += d;
  }
  max_out = worst;
  mean_out = sum / static_cast<double>(from.points.size());
}

}  // namespace

double hausdorff(const GestureCloud& a, const GestureCloud& b) {
  require_non_empty(a, "hausdorff");
  require_non_empty(b, "hausdorff");
  double max_ab, mean_ab, max_ba, mean_ba;
  directed_nn(a, b, max_ab, mean_ab);
  directed_nn(b, a, max_ba, mean_ba);
  return std::max(max_ab, max_ba);
}

double chamfer(const GestureCloud& a, const GestureCloud& b) {
  require_non_empty(a, "chamfer");
  require_non_empty(b, "chamfer");
  double max_ab, mean_ab, max_ba, mean_ba;
  directed_nn(a, b, max_ab, mean_ab);
  directed_nn(b, a, max_ba, mean_ba);
  return 0.5 * (mean_ab + mean_ba);
}

double jsd(const GestureCloud& a, const GestureCloud& b, double voxel) {
  require_non_empty(a, "jsd");
  require_non_empty(b, "jsd");
  if (!(voxel > 0.0)) fail(Errc::non_positive_voxel, "jsd: voxel edge must be > 0");

  Eigen::Vector3d lo = a.points.front().xyz();
  for (const Point& p : a.points) lo = lo.cwiseMin(p.xyz());
  for (const Point& p : b.points) lo = lo.cwiseMin(p.xyz());

  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  const auto key_of = [&](const Point& p) -> Key {
    return {static_cast<std::int64_t>(std::floor((p.x - lo.x()) / voxel)),
            static_cast<std::int64_t>(std::floor((p.y - lo.y()) / voxel)),
            static_cast<std::int64_t>(std::floor((p.z - lo.z()) / voxel))};
  };

  // std::map keeps voxel iteration order sorted, hence reproducible.
  std::map<Key, std::pair<double, double>> occupancy;
  for (const Point& p : a.points) occupancy[key_of(p)].first += 1.0;
  for (const Point& p : b.points) occupancy[key_of(p)].second += 1.0;

  const double na = static_cast<double>(a.points.size());
  const double nb = static_cast<double>(b.points.size());
  double div = 0.0;
  for (const auto& [key, counts] : occupancy) {
    const double pa = counts.first / na;
    const double pb = counts.second / nb;
    const double m = 0.5 * (pa + pb);
    const auto term = [&](double p) { return p > 0.0 ? 0.5 * p * std::log2(p / m) : 0.0; };
    // Accumulate the voxel's pair in value order so jsd(a,b) == jsd(b,a) exactly.
    div += term(std::min(pa, pb)) + term(std::max(pa, pb));
  }
  return std::clamp(div, 0.0, 1.0);
}

double collection_difference(const CloudCollection& c1, const CloudCollection& c2,
                             CloudMetric metric, double voxel) {
  if (c1.clouds.empty() || c2.clouds.empty())
    fail(Errc::empty_collection, "collection_difference: empty collection");
  if (c1.gesture_label && c2.gesture_label && *c1.gesture_label != *c2.gesture_label)
    fail(Errc::bad_config, "collection_difference: gesture labels differ");

  double sum = 0.0;
  std::size_t pairs = 0;
  for (const GestureCloud& cn : c1.clouds) {
    for (const GestureCloud& cm : c2.clouds) {
      if (&cn == &cm) continue;
      switch (metric) {
        case CloudMetric::HD: sum += hausdorff(cn, cm); break;
        case CloudMetric::CD: sum += chamfer(cn, cm); break;
        case CloudMetric::JSD: sum += jsd(cn, cm, voxel); break;
      }
      ++pairs;
    }
  }
  if (pairs == 0)
    fail(Errc::no_valid_pairs, "collection_difference: no distinct cloud pairs");
  return sum / static_cast<double>(pairs);
}

}  // namespace mmgest
