#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mmgest/net_types.hpp"
#include "mmgest/types.hpp"

namespace mmgest {

// Farthest-point sampling. The walk starts at index 0 (the lowest-index point
// of the seeded resample), each pick maximizes the min distance to the picked
// set (ties to the lowest index), and when n exceeds the point count the
// resulting permutation is cycled. `seed` is accepted for signature stability
// but unused: the start rule already makes the result deterministic.
std::vector<int> farthest_point_sample(const Eigen::Matrix3Xd& xyz, int n,
                                       std::uint64_t seed = 0);

// For every center index: up to m neighbors with distance <= radius,
// ascending by (distance, index). Short groups are padded by repeating the
// nearest qualifying point; since the center is itself a point of the set, a
// lone center yields itself repeated m times. Returns m entries per center,
// group j at [j*m, (j+1)*m).
std::vector<int> ball_query_group(const Eigen::Matrix3Xd& xyz,
                                  const std::vector<int>& center_idx, double radius,
                                  int m);

// Geometry of one abstraction block, fixed per input cloud.
struct PreparedScale {
  std::vector<int> members;      // m * centers, see ball_query_group
  Eigen::MatrixXd base_input;    // (3 + feat) x (m * centers); top 3 rows are
                                 // center-relative xyz, feature rows are
                                 // prefilled for sa1 and zero for sa2
};

struct PreparedBlock {
  std::vector<int> center_idx;
  Eigen::Matrix3Xd center_xyz;
  std::vector<PreparedScale> scales;
};

// Everything about a network input that does not depend on parameters:
// the feature matrix plus the sampling/grouping structure of both blocks.
struct PreparedInput {
  Eigen::MatrixXd x;  // in_channels x point_count
  PreparedBlock sa1;
  PreparedBlock sa2;  // grouped over sa1's centers
};

// The cloud must already be centered and resampled to cfg.point_count.
PreparedInput prepare_input(const GestureCloud& cloud, const NetConfig& cfg);

}  // namespace mmgest
