#include "mmgest/augment.hpp"

#include "mmgest/rng.hpp"

namespace mmgest {

std::vector<GestureCloud> jitter_augment(const GestureCloud& c, const AugmentConfig& cfg,
                                         std::uint64_t rng_seed) {
  cfg.validate();
  if (c.empty()) fail(Errc::empty_cloud, "jitter_augment: empty cloud");

  std::vector<GestureCloud> out;
  out.reserve(static_cast<std::size_t>(cfg.copies));
  for (int copy = 0; copy < cfg.copies; ++copy) {
    Rng rng(mix_seed(rng_seed, static_cast<std::uint64_t>(copy)));
    GestureCloud jittered = c;
    for (Point& p : jittered.points) {
      p.x += rng.normal(cfg.mean, cfg.sigma);
      p.y += rng.normal(cfg.mean, cfg.sigma);
      p.z += rng.normal(cfg.mean, cfg.sigma);
    }
    out.push_back(std::move(jittered));
  }
  return out;
}

}  // namespace mmgest
