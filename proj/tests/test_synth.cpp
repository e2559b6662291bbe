#include <doctest.h>

#include <map>

#include "mmgest/metrics.hpp"
#include "mmgest/synth.hpp"
#include "oracles.hpp"

using namespace mmgest;

TEST_CASE("synth_stream schedule validation and annotation layout") {
  const std::vector<UserProfile> users = {{0, 1.0, 1.0, Eigen::Vector3d::Zero(), 0.01}};
  const auto templates = make_gesture_templates(2);

  std::vector<ScheduleEvent> schedule = {{0, 0, 20}, {0, 1, 80}, {0, 0, 140}};
  const SynthStream s = synth_stream(users, templates, schedule, NoiseConfig{}, 5);
  REQUIRE(s.annotations.events.size() == 3);
  for (std::size_t i = 1; i < s.annotations.events.size(); ++i)
    CHECK(s.annotations.events[i].start_frame > s.annotations.events[i - 1].end_frame);
  CHECK(s.annotations.provenance.size() == s.stream.frames.size());
  for (std::size_t f = 0; f < s.stream.frames.size(); ++f)
    CHECK(s.annotations.provenance[f].size() == s.stream.frames[f].points.size());
  for (const Frame& f : s.stream.frames)
    for (const Point& p : f.points) CHECK(p.finite());

  // Overlap: second event starts inside the first.
  std::vector<ScheduleEvent> overlap = {{0, 0, 20}, {0, 1, 25}};
  CHECK_THROWS_AS(synth_stream(users, templates, overlap, NoiseConfig{}, 5), Error);
  CHECK_THROWS_AS(synth_stream({}, templates, schedule, NoiseConfig{}, 5), Error);
}

TEST_CASE("synth_stream with zero background is purely gesture points") {
  const std::vector<UserProfile> users = {{0, 1.0, 1.0, Eigen::Vector3d::Zero(), 0.01}};
  const auto templates = make_gesture_templates(1);
  NoiseConfig noise;
  noise.background_rate = 0.0;
  const SynthStream s = synth_stream(users, templates, {{0, 0, 15}}, noise, 8);
  const OracleEvent ev = s.annotations.events[0];
  for (std::size_t f = 0; f < s.stream.frames.size(); ++f) {
    const bool inside = static_cast<int>(f) >= ev.start_frame &&
                        static_cast<int>(f) <= ev.end_frame;
    if (!inside) CHECK(s.stream.frames[f].points.empty());
    for (std::uint8_t flag : s.annotations.provenance[f]) CHECK(flag == 1);
  }
}

TEST_CASE("synth_stream per-frame gesture point count has the configured mean") {
  const std::vector<UserProfile> users = {{0, 1.0, 1.0, Eigen::Vector3d::Zero(), 0.01}};
  std::vector<GestureTemplate> templates = make_gesture_templates(1);
  templates[0].duration = 200;
  NoiseConfig noise;
  noise.background_rate = 0.0;

  // ~10^4 in-gesture frames across many events.
  std::vector<ScheduleEvent> schedule;
  for (int k = 0; k < 50; ++k) schedule.push_back({0, 0, 15 + k * 215});
  const SynthStream s = synth_stream(users, templates, schedule, noise, 99);
  std::size_t frames = 0, points = 0;
  for (const auto& ev : s.annotations.events)
    for (int f = ev.start_frame; f <= ev.end_frame; ++f) {
      ++frames;
      points += s.stream.frames[static_cast<std::size_t>(f)].points.size();
    }
  REQUIRE(frames >= 10000);
  const double mean = static_cast<double>(points) / static_cast<double>(frames);
  CHECK(mean >= 19.0);
  CHECK(mean <= 21.0);
}

TEST_CASE("synth_stream determinism per seed") {
  const std::vector<UserProfile> users = {{0, 1.1, 0.9, {0.1, 0, 0}, 0.02}};
  const auto templates = make_gesture_templates(3);
  const std::vector<ScheduleEvent> schedule = {{0, 2, 30}};
  const SynthStream a = synth_stream(users, templates, schedule, NoiseConfig{}, 31);
  const SynthStream b = synth_stream(users, templates, schedule, NoiseConfig{}, 31);
  REQUIRE(a.stream.frames.size() == b.stream.frames.size());
  for (std::size_t f = 0; f < a.stream.frames.size(); ++f) {
    REQUIRE(a.stream.frames[f].points.size() == b.stream.frames[f].points.size());
    for (std::size_t i = 0; i < a.stream.frames[f].points.size(); ++i) {
      CHECK(a.stream.frames[f].points[i].x == b.stream.frames[f].points[i].x);
      CHECK(a.stream.frames[f].points[i].doppler == b.stream.frames[f].points[i].doppler);
    }
  }
}

TEST_CASE("aggregating an oracle range collects gesture and background points alike") {
  const std::vector<UserProfile> users = {{0, 1.0, 1.0, Eigen::Vector3d::Zero(), 0.01}};
  const auto templates = make_gesture_templates(1);
  NoiseConfig noise;
  noise.background_rate = 0.5;
  const SynthStream s = synth_stream(users, templates, {{0, 0, 25}}, noise, 77);
  const OracleEvent ev = s.annotations.events[0];

  Segment seg{ev.start_frame, ev.end_frame, ev.end_frame - ev.start_frame + 1, 3};
  const GestureCloud cloud = aggregate_segment(s.stream, seg);

  std::size_t expected = 0, gesture_flagged = 0;
  for (int f = ev.start_frame; f <= ev.end_frame; ++f) {
    expected += s.stream.frames[static_cast<std::size_t>(f)].points.size();
    for (std::uint8_t flag : s.annotations.provenance[static_cast<std::size_t>(f)])
      gesture_flagged += flag;
  }
  CHECK(cloud.points.size() == expected);  // union of in-gesture and background
  CHECK(gesture_flagged > 0);
  CHECK(gesture_flagged < expected);  // some background really is in range
}

TEST_CASE("synth_dataset produces a verified labeled corpus") {
  SynthDatasetConfig cfg;
  cfg.n_users = 2;
  cfg.n_gestures = 2;
  cfg.samples_per_cell = 5;
  cfg.seed = 17;
  const SynthDataset data = synth_dataset(cfg);

  CHECK(data.dataset.samples.size() == 2 * 2 * 5);
  CHECK(data.streams.size() == 4);
  std::map<std::pair<int, int>, int> cells;
  for (const LabeledCloud& s : data.dataset.samples) {
    CHECK(!s.cloud.empty());
    cells[{s.gesture, s.user}] += 1;
    for (const Point& p : s.cloud.points) CHECK(p.finite());
  }
  for (const auto& [cell, count] : cells) CHECK(count == 5);

  CHECK_THROWS_AS(synth_dataset(1, 2, 5, 1), Error);
}

TEST_CASE("bounding-box diagonal is monotone in motion_scale") {
  SynthDatasetConfig cfg;
  cfg.n_users = 4;
  cfg.n_gestures = 2;
  cfg.samples_per_cell = 20;
  cfg.seed = 23;
  const SynthDataset data = synth_dataset(cfg);

  std::vector<double> mean_diag(4, 0.0);
  std::vector<int> count(4, 0);
  for (const LabeledCloud& s : data.dataset.samples) {
    mean_diag[static_cast<std::size_t>(s.user)] += bounding_box(s.cloud).diagonal();
    count[static_cast<std::size_t>(s.user)] += 1;
  }
  for (int u = 0; u < 4; ++u) mean_diag[static_cast<std::size_t>(u)] /= count[u];
  // Profiles are built with increasing motion_scale: rank correlation 1.
  for (int u = 1; u < 4; ++u)
    CHECK(mean_diag[static_cast<std::size_t>(u)] > mean_diag[static_cast<std::size_t>(u - 1)]);
}

TEST_CASE("intra-user collection difference undercuts inter-user for every metric") {
  SynthDatasetConfig cfg;
  cfg.n_users = 2;
  cfg.n_gestures = 3;
  cfg.samples_per_cell = 8;
  cfg.seed = 29;
  cfg.motion_scales = {1.0, 1.3};
  const SynthDataset data = synth_dataset(cfg);

  for (int g = 0; g < cfg.n_gestures; ++g) {
    CloudCollection u0, u1;
    for (const LabeledCloud& s : data.dataset.samples) {
      if (s.gesture != g) continue;
      (s.user == 0 ? u0 : u1).clouds.push_back(s.cloud);
    }
    for (CloudMetric m : {CloudMetric::HD, CloudMetric::CD, CloudMetric::JSD}) {
      const double intra0 = collection_difference(u0, u0, m);
      const double intra1 = collection_difference(u1, u1, m);
      const double inter = collection_difference(u0, u1, m);
      CHECK(intra0 < inter);
      CHECK(intra1 < inter);
    }
  }
}
