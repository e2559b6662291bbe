#pragma once

#include <cstdint>
#include <vector>

#include "mmgest/types.hpp"

namespace mmgest {

struct AugmentConfig {
  double sigma = 0.02;  // meters, per-axis displacement std
  double mean = 0.0;    // meters, fixed 0
  int copies = 3;

  void validate() const {
    if (sigma < 0.0) fail(Errc::bad_config, "augment: sigma must be >= 0");
    if (copies < 0) fail(Errc::bad_config, "augment: copies must be >= 0");
  }
};

// `copies` jittered clouds; each point's (x,y,z) gets independent Gaussian
// displacement per axis, doppler/intensity untouched. The input cloud is not
// part of the returned list. Deterministic per (seed, copy index).
std::vector<GestureCloud> jitter_augment(const GestureCloud& c, const AugmentConfig& cfg,
                                         std::uint64_t rng_seed);

}  // namespace mmgest
