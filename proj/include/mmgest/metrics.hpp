#pragma once

#include "mmgest/types.hpp"

namespace mmgest {

enum class CloudMetric { HD, CD, JSD };

// Symmetric Hausdorff distance on (x,y,z), meters.
double hausdorff(const GestureCloud& a, const GestureCloud& b);

// Symmetric Chamfer distance: half the sum of the two directed mean
// closest-point distances, unsquared Euclidean, meters.
double chamfer(const GestureCloud& a, const GestureCloud& b);

// Jensen-Shannon divergence between voxel-occupancy distributions, log base 2,
// in [0, 1]. The grid is anchored at the minimum corner of the union bounding
// box with cubic cells of edge `voxel`.
double jsd(const GestureCloud& a, const GestureCloud& b, double voxel = 0.1);

// Mean pairwise difference over ordered pairs (c_n in c1, c_m in c2), with
// pairs of object-identical clouds excluded. Identity is address identity:
// passing the same collection for c1 and c2 excludes the diagonal. The
// divisor is the number of included pairs.
double collection_difference(const CloudCollection& c1, const CloudCollection& c2,
                             CloudMetric metric, double voxel = 0.1);

}  // namespace mmgest
