#pragma once

#include <Eigen/Core>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmgest/error.hpp"

namespace mmgest {

// Radar point: Cartesian position (m), radial velocity (m/s), SNR-like
// intensity (dimensionless, >= 0).
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double doppler = 0.0;
  double intensity = 0.0;

  Eigen::Vector3d xyz() const { return {x, y, z}; }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
           std::isfinite(doppler) && std::isfinite(intensity) && intensity >= 0.0;
  }
};

inline double distance(const Point& a, const Point& b) {
  return (a.xyz() - b.xyz()).norm();
}

inline double distance_sq(const Point& a, const Point& b) {
  return (a.xyz() - b.xyz()).squaredNorm();
}

// One radar frame: the point set observed during a single frame interval.
struct Frame {
  int index = 0;
  double t = 0.0;  // seconds, index / frame_rate
  std::vector<Point> points;
};

struct FrameStream {
  double frame_rate = 10.0;  // Hz
  std::vector<Frame> frames;
  std::map<std::string, std::string> meta;
};

// Aggregated, (optionally) denoised points of one gesture motion.
struct GestureCloud {
  std::vector<Point> points;
  int start_frame = 0;
  int end_frame = 0;
  std::string source;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct CloudCollection {
  std::vector<GestureCloud> clouds;
  std::optional<int> gesture_label;
  std::optional<int> user_label;
};

// 5 x N feature matrix (x, y, z, doppler, intensity), one column per point.
inline Eigen::MatrixXd to_matrix(const GestureCloud& c) {
  Eigen::MatrixXd m(5, static_cast<Eigen::Index>(c.points.size()));
  for (Eigen::Index i = 0; i < m.cols(); ++i) {
    const Point& p = c.points[static_cast<std::size_t>(i)];
    m.col(i) << p.x, p.y, p.z, p.doppler, p.intensity;
  }
  return m;
}

struct BoundingBox {
  Eigen::Vector3d lo = Eigen::Vector3d::Zero();
  Eigen::Vector3d hi = Eigen::Vector3d::Zero();

  double diagonal() const { return (hi - lo).norm(); }
};

inline BoundingBox bounding_box(const GestureCloud& c) {
  if (c.empty()) fail(Errc::empty_cloud, "bounding_box: empty cloud");
  BoundingBox box;
  box.lo = box.hi = c.points.front().xyz();
  for (const Point& p : c.points) {
    box.lo = box.lo.cwiseMin(p.xyz());
    box.hi = box.hi.cwiseMax(p.xyz());
  }
  return box;
}

// A cloud with both task labels attached; the unit of supervised datasets.
struct LabeledCloud {
  GestureCloud cloud;
  int gesture = -1;
  int user = -1;
};

struct Dataset {
  std::vector<LabeledCloud> samples;
  int num_gestures = 0;
  int num_users = 0;
};

}  // namespace mmgest
