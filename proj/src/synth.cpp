#include "mmgest/synth.hpp"

#include <algorithm>
#include <cmath>

#include "mmgest/rng.hpp"

namespace mmgest {

namespace {

// Gestures happen around a subject standing ~1.2 m in front of the radar.
const Eigen::Vector3d kSubjectCenter(0.0, 1.2, 0.1);

// How strongly a user's range of motion depends on the specific gesture.
// Real users do not scale every motion uniformly (an arm sweep and a push
// engage different joints), so each (user, gesture) pair gets a bounded,
// deterministic multiplier. This is what makes per-gesture identification
// models genuinely easier than one model across all gestures.
constexpr double kScaleAffinityAmp = 0.06;

double gesture_affinity(int user_id, int gesture_id) {  // in [-1, 1]
  const std::uint64_t h = mix_seed(static_cast<std::uint64_t>(user_id) + 101,
                                   static_cast<std::uint64_t>(gesture_id) + 7);
  return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
}

double triangle_wave(double u) {  // period 1, range [-1, 1]
  const double s = u - std::floor(u);
  return s < 0.5 ? 4.0 * s - 1.0 : 3.0 - 4.0 * s;
}

}  // namespace

Eigen::Vector3d trajectory_point(const GestureTemplate& t, double tau) {
  switch (t.kind) {
    case TrajectoryKind::Line:
      return t.size * Eigen::Vector3d(0.8 * (tau - 0.5), 0.0, 0.0);
    case TrajectoryKind::Arc:
      return t.size * Eigen::Vector3d(0.4 * std::cos(M_PI * tau), 0.0,
                                      0.4 * std::sin(M_PI * tau));
    case TrajectoryKind::Zigzag:
      return t.size *
             Eigen::Vector3d(0.7 * (tau - 0.5), 0.0, 0.18 * triangle_wave(3.0 * tau));
    case TrajectoryKind::Push:
      return t.size * Eigen::Vector3d(0.0, -0.5 * tau, 0.0);
    case TrajectoryKind::Circle:
      return t.size * Eigen::Vector3d(0.35 * std::cos(2.0 * M_PI * tau), 0.0,
                                      0.35 * std::sin(2.0 * M_PI * tau));
  }
  fail(Errc::bad_config, "trajectory_point: unknown kind");
}

int event_duration(const GestureTemplate& t, const UserProfile& u) {
  if (!(u.speed_factor > 0.0)) fail(Errc::bad_config, "event_duration: speed must be > 0");
  const int frames = static_cast<int>(std::lround(t.duration / u.speed_factor));
  return std::max(10, frames);
}

SynthStream synth_stream(const std::vector<UserProfile>& users,
                         const std::vector<GestureTemplate>& templates,
                         const std::vector<ScheduleEvent>& schedule,
                         const NoiseConfig& noise, std::uint64_t seed) {
  if (users.empty() || templates.empty())
    fail(Errc::bad_config, "synth_stream: users and templates must be non-empty");

  struct Placed {
    ScheduleEvent ev;
    int duration;
    int end;
  };
  std::vector<Placed> placed;
  for (const ScheduleEvent& ev : schedule) {
    if (ev.user < 0 || ev.user >= static_cast<int>(users.size()) || ev.tmpl < 0 ||
        ev.tmpl >= static_cast<int>(templates.size()) || ev.start_frame < 0)
      fail(Errc::bad_schedule, "synth_stream: event references out of range");
    const int dur = event_duration(templates[static_cast<std::size_t>(ev.tmpl)],
                                   users[static_cast<std::size_t>(ev.user)]);
    placed.push_back({ev, dur, ev.start_frame + dur - 1});
  }
  std::sort(placed.begin(), placed.end(),
            [](const Placed& a, const Placed& b) { return a.ev.start_frame < b.ev.start_frame; });
  for (std::size_t i = 1; i < placed.size(); ++i)
    if (placed[i].ev.start_frame <= placed[i - 1].end)
      fail(Errc::bad_schedule, "synth_stream: overlapping events");

  const int total_frames = (placed.empty() ? 0 : placed.back().end + 1) + 25;
  SynthStream out;
  out.stream.frame_rate = 10.0;
  out.stream.meta["generator"] = "synth";
  out.stream.frames.reserve(static_cast<std::size_t>(total_frames));
  out.annotations.provenance.resize(static_cast<std::size_t>(total_frames));

  for (const Placed& p : placed)
    out.annotations.events.push_back({p.ev.start_frame, p.end,
                                      templates[static_cast<std::size_t>(p.ev.tmpl)].gesture_id,
                                      users[static_cast<std::size_t>(p.ev.user)].user_id});

  Rng rng(mix_seed(seed, 0x5741ull));
  std::size_t active = 0;  // next event to consider; events are start-sorted

  for (int f = 0; f < total_frames; ++f) {
    Frame frame;
    frame.index = f;
    frame.t = f / out.stream.frame_rate;
    auto& prov = out.annotations.provenance[static_cast<std::size_t>(f)];

    while (active < placed.size() && placed[active].end < f) ++active;
    const bool in_event =
        active < placed.size() && placed[active].ev.start_frame <= f && f <= placed[active].end;

    if (in_event) {
      const Placed& p = placed[active];
      const UserProfile& user = users[static_cast<std::size_t>(p.ev.user)];
      const GestureTemplate& tmpl = templates[static_cast<std::size_t>(p.ev.tmpl)];
      const double denom = std::max(1, p.duration - 1);
      const double tau = (f - p.ev.start_frame) / denom;
      const double tau_step = 1.0 / denom;

      const double scale =
          user.motion_scale *
          (1.0 + kScaleAffinityAmp * gesture_affinity(user.user_id, tmpl.gesture_id));
      const Eigen::Vector3d center = kSubjectCenter + user.center_offset;
      const auto on_curve = [&](double phase) -> Eigen::Vector3d {
        return center + scale * trajectory_point(tmpl, phase);
      };
      const Eigen::Vector3d pos = on_curve(tau);
      // Actual-pace velocity: the step already reflects speed_factor through
      // the shortened duration.
      const Eigen::Vector3d vel =
          (tau + tau_step <= 1.0 ? on_curve(tau + tau_step) - pos
                                 : pos - on_curve(tau - tau_step)) *
          out.stream.frame_rate;

      const int k = rng.poisson(noise.gesture_rate);
      const double scatter = tmpl.spread * scale + user.style_jitter;
      for (int j = 0; j < k; ++j) {
        Point pt;
        pt.x = pos.x() + rng.normal(0.0, scatter);
        pt.y = pos.y() + rng.normal(0.0, scatter);
        pt.z = pos.z() + rng.normal(0.0, scatter);
        const Eigen::Vector3d dir = pt.xyz().normalized();
        pt.doppler = vel.dot(dir) + rng.normal(0.0, noise.doppler_noise);
        pt.intensity = std::abs(rng.normal(1.0, 0.3));
        frame.points.push_back(pt);
        prov.push_back(1);
      }
    }

    const int b = rng.poisson(noise.background_rate);
    for (int j = 0; j < b; ++j) {
      Point pt;
      pt.x = rng.uniform(noise.box_lo.x(), noise.box_hi.x());
      pt.y = rng.uniform(noise.box_lo.y(), noise.box_hi.y());
      pt.z = rng.uniform(noise.box_lo.z(), noise.box_hi.z());
      pt.doppler = rng.normal(0.0, noise.background_doppler);
      pt.intensity = std::abs(rng.normal(1.0, 0.3));
      frame.points.push_back(pt);
      prov.push_back(0);
    }

    out.stream.frames.push_back(std::move(frame));
  }
  return out;
}

std::vector<UserProfile> make_user_profiles(const SynthDatasetConfig& cfg) {
  if (cfg.n_users < 1) fail(Errc::bad_config, "make_user_profiles: need n_users >= 1");
  if (!cfg.motion_scales.empty() &&
      static_cast<int>(cfg.motion_scales.size()) != cfg.n_users)
    fail(Errc::bad_config, "make_user_profiles: motion_scales size mismatch");

  const auto spaced = [&](double lo, double hi, int i) {
    return cfg.n_users == 1 ? 0.5 * (lo + hi)
                            : lo + (hi - lo) * i / static_cast<double>(cfg.n_users - 1);
  };

  // Secondary traits run through a fixed coprime stride so they do not simply
  // co-vary with motion scale.
  std::vector<UserProfile> users;
  for (int i = 0; i < cfg.n_users; ++i) {
    UserProfile u;
    u.user_id = i;
    u.motion_scale = cfg.motion_scales.empty()
                         ? spaced(0.7, 1.3, i)
                         : cfg.motion_scales[static_cast<std::size_t>(i)];
    const int speed_slot = (i * 3 + 1) % cfg.n_users;
    u.speed_factor = spaced(0.78, 1.25, speed_slot);
    const int jitter_slot = (i * 5 + 2) % cfg.n_users;
    u.style_jitter = spaced(0.006, 0.03, jitter_slot);
    const double angle = 2.0 * M_PI * i / std::max(1, cfg.n_users);
    u.center_offset =
        Eigen::Vector3d(0.15 * std::cos(angle), 0.0, 0.15 * std::sin(angle));
    users.push_back(u);
  }
  return users;
}

std::vector<GestureTemplate> make_gesture_templates(int n_gestures) {
  if (n_gestures < 1) fail(Errc::bad_config, "make_gesture_templates: need >= 1");
  std::vector<GestureTemplate> templates;
  for (int g = 0; g < n_gestures; ++g) {
    GestureTemplate t;
    t.gesture_id = g;
    t.kind = static_cast<TrajectoryKind>(g % 5);
    t.size = 1.0 + 0.12 * (g / 5);
    t.duration = 18 + 3 * (g % 4);
    t.spread = 0.07 + 0.01 * (g % 3);
    templates.push_back(t);
  }
  return templates;
}

SynthDataset synth_dataset(const SynthDatasetConfig& cfg) {
  if (cfg.n_users < 2 || cfg.n_gestures < 2)
    fail(Errc::bad_config, "synth_dataset: need at least 2 users and 2 gestures");
  if (cfg.samples_per_cell < 1)
    fail(Errc::bad_config, "synth_dataset: need samples_per_cell >= 1");
  if (cfg.gap_min < cfg.segmenter.win_len || cfg.gap_max < cfg.gap_min)
    fail(Errc::bad_config, "synth_dataset: gaps must be >= the detection window");

  SynthDataset out;
  out.users = make_user_profiles(cfg);
  out.templates = make_gesture_templates(cfg.n_gestures);
  out.dataset.num_gestures = cfg.n_gestures;
  out.dataset.num_users = cfg.n_users;

  for (int g = 0; g < cfg.n_gestures; ++g) {
    for (int u = 0; u < cfg.n_users; ++u) {
      const std::uint64_t cell_seed =
          mix_seed(cfg.seed, static_cast<std::uint64_t>(g) * 1000 + u);
      Rng gap_rng(mix_seed(cell_seed, 0x6701ull));

      std::vector<ScheduleEvent> schedule;
      int cursor = cfg.gap_min +
                   static_cast<int>(gap_rng.uniform_index(cfg.gap_max - cfg.gap_min + 1));
      for (int k = 0; k < cfg.samples_per_cell; ++k) {
        schedule.push_back({u, g, cursor});
        cursor += event_duration(out.templates[static_cast<std::size_t>(g)],
                                 out.users[static_cast<std::size_t>(u)]);
        cursor += cfg.gap_min +
                  static_cast<int>(gap_rng.uniform_index(cfg.gap_max - cfg.gap_min + 1));
      }

      SynthStream stream =
          synth_stream(out.users, out.templates, schedule, cfg.noise, cell_seed);
      const std::vector<Segment> segments = segment_stream(stream.stream, cfg.segmenter);
      const auto& events = stream.annotations.events;
      if (segments.size() != events.size())
        fail(Errc::oracle_mismatch,
             "synth_dataset: segment count " + std::to_string(segments.size()) +
                 " != oracle " + std::to_string(events.size()));
      for (std::size_t k = 0; k < segments.size(); ++k) {
        if (std::abs(segments[k].start_frame - events[k].start_frame) > 2 ||
            std::abs(segments[k].end_frame - events[k].end_frame) > 2)
          fail(Errc::oracle_mismatch, "synth_dataset: boundary off by more than 2 frames");
        GestureCloud cloud = aggregate_segment(stream.stream, segments[k]);
        cloud = keep_main_cluster(cloud, cfg.denoise);
        out.dataset.samples.push_back({std::move(cloud), g, u});
      }
      out.streams.push_back(std::move(stream));
    }
  }
  return out;
}

SynthDataset synth_dataset(int n_users, int n_gestures, int samples_per_cell,
                           std::uint64_t seed) {
  SynthDatasetConfig cfg;
  cfg.n_users = n_users;
  cfg.n_gestures = n_gestures;
  cfg.samples_per_cell = samples_per_cell;
  cfg.seed = seed;
  return synth_dataset(cfg);
}

}  // namespace mmgest
