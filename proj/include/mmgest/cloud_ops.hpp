#pragma once

#include <cstdint>

#include "mmgest/types.hpp"

namespace mmgest {

// Translate (x,y,z) so the centroid is at the origin; doppler/intensity kept.
GestureCloud normalize_center(const GestureCloud& c);

// Resample to exactly p_count points: without replacement when the cloud is
// large enough, otherwise all originals plus uniform draws with replacement.
GestureCloud resample_fixed(const GestureCloud& c, int p_count, std::uint64_t rng_seed);

}  // namespace mmgest
