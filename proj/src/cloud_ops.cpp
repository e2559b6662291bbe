#include "mmgest/cloud_ops.hpp"

#include <numeric>

#include "mmgest/rng.hpp"

namespace mmgest {

GestureCloud normalize_center(const GestureCloud& c) {
  if (c.empty()) fail(Errc::empty_cloud, "normalize_center: empty cloud");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const Point& p : c.points) centroid += p.xyz();
  centroid /= static_cast<double>(c.points.size());

  GestureCloud out = c;
  for (Point& p : out.points) {
    p.x -= centroid.x();
    p.y -= centroid.y();
    p.z -= centroid.z();
  }
  return out;
}

GestureCloud resample_fixed(const GestureCloud& c, int p_count, std::uint64_t rng_seed) {
  if (c.empty()) fail(Errc::empty_cloud, "resample_fixed: empty cloud");
  if (p_count < 1) fail(Errc::bad_config, "resample_fixed: p_count must be >= 1");

  const std::size_t n = c.points.size();
  const std::size_t want = static_cast<std::size_t>(p_count);
  Rng rng(rng_seed);

  GestureCloud out;
  out.start_frame = c.start_frame;
  out.end_frame = c.end_frame;
  out.source = c.source;
  out.points.reserve(want);

  if (n >= want) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.partial_shuffle(idx, want);
    for (std::size_t i = 0; i < want; ++i) out.points.push_back(c.points[idx[i]]);
  } else {
    out.points = c.points;
    for (std::size_t i = n; i < want; ++i)
      out.points.push_back(c.points[rng.uniform_index(n)]);
  }
  return out;
}

}  // namespace mmgest
