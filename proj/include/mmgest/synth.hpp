#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mmgest/denoise.hpp"
#include "mmgest/segment.hpp"
#include "mmgest/types.hpp"

namespace mmgest {

struct UserProfile {
  int user_id = 0;
  double motion_scale = 1.0;  // range-of-motion multiplier
  double speed_factor = 1.0;  // >1 performs gestures faster (shorter)
  Eigen::Vector3d center_offset = Eigen::Vector3d::Zero();  // meters
  double style_jitter = 0.01;  // per-user tremor std, meters
};

enum class TrajectoryKind { Line, Arc, Zigzag, Push, Circle };

struct GestureTemplate {
  int gesture_id = 0;
  TrajectoryKind kind = TrajectoryKind::Line;
  int duration = 24;     // frames at speed_factor 1
  double spread = 0.08;  // point scatter around the trajectory, meters
  double size = 1.0;     // amplitude multiplier on the base curve
};

struct ScheduleEvent {
  int user = 0;   // index into the user list
  int tmpl = 0;   // index into the template list
  int start_frame = 0;
};

struct NoiseConfig {
  double gesture_rate = 20.0;      // Poisson points per in-gesture frame
  double background_rate = 2.0;    // Poisson clutter points per frame
  double doppler_noise = 0.05;     // m/s, on gesture points
  double background_doppler = 0.1; // m/s
  Eigen::Vector3d box_lo{-2.0, 0.0, -1.0};  // clutter volume (4 x 4 x 2 m)
  Eigen::Vector3d box_hi{2.0, 4.0, 1.0};
};

struct OracleEvent {
  int start_frame = 0;
  int end_frame = 0;
  int gesture_id = 0;
  int user_id = 0;
};

struct OracleAnnotations {
  std::vector<OracleEvent> events;
  // Per frame, per point, 1 = gesture point, 0 = background clutter.
  std::vector<std::vector<std::uint8_t>> provenance;
};

struct SynthStream {
  FrameStream stream;
  OracleAnnotations annotations;
};

// Position on the unscaled trajectory at phase tau in [0, 1], relative to the
// gesture center.
Eigen::Vector3d trajectory_point(const GestureTemplate& t, double tau);

// Per-user event duration: the template's frame count divided by speed.
int event_duration(const GestureTemplate& t, const UserProfile& u);

// Labeled frame stream: per in-gesture frame, Poisson(gesture_rate) points
// scattered around the user-scaled trajectory with doppler following the
// radial motion; per every frame, Poisson(background_rate) clutter points
// uniform in the box. Deterministic per seed.
SynthStream synth_stream(const std::vector<UserProfile>& users,
                         const std::vector<GestureTemplate>& templates,
                         const std::vector<ScheduleEvent>& schedule,
                         const NoiseConfig& noise, std::uint64_t seed);

struct SynthDatasetConfig {
  int n_users = 8;
  int n_gestures = 5;
  int samples_per_cell = 20;
  std::uint64_t seed = 1;
  // Explicit motion scales (size n_users) or empty for even spacing over
  // [0.7, 1.3].
  std::vector<double> motion_scales;
  int gap_min = 20;  // idle frames between gestures (2-4 s at 10 fps)
  int gap_max = 40;
  NoiseConfig noise = dataset_noise_defaults();
  SegmenterConfig segmenter;
  DenoiseConfig denoise;

  // Clutter sparse enough that segmentation boundaries stay exact and
  // density clustering removes the residue (see README on noise levels).
  static NoiseConfig dataset_noise_defaults() {
    NoiseConfig n;
    n.background_rate = 0.05;
    return n;
  }
};

struct SynthDataset {
  Dataset dataset;  // denoised labeled clouds, verified against the oracle
  std::vector<SynthStream> streams;  // one per (gesture, user) cell
  std::vector<UserProfile> users;
  std::vector<GestureTemplate> templates;
};

// Distinct user profiles (spaced motion scales per the config), one stream of
// samples_per_cell gestures per (gesture, user) cell, segmented and denoised
// with ground-truth verification: every oracle event must be recovered with
// boundaries within +-2 frames, else the call throws.
SynthDataset synth_dataset(const SynthDatasetConfig& cfg);
SynthDataset synth_dataset(int n_users, int n_gestures, int samples_per_cell,
                           std::uint64_t seed);

// Deterministic profile/template builders, exposed for direct tests.
std::vector<UserProfile> make_user_profiles(const SynthDatasetConfig& cfg);
std::vector<GestureTemplate> make_gesture_templates(int n_gestures);

}  // namespace mmgest
