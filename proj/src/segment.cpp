#include "mmgest/segment.hpp"

#include <algorithm>
#include <cmath>

namespace mmgest {

void SegmenterConfig::validate() const {
  if (!(1 <= min_motion && min_motion <= win_len && win_len <= hist_len))
    fail(Errc::bad_config, "segmenter: need 1 <= min_motion <= win_len <= hist_len");
  if (!(quantile > 0.0 && quantile < 1.0))
    fail(Errc::bad_config, "segmenter: quantile must be in (0, 1)");
  if (floor < 1) fail(Errc::bad_config, "segmenter: floor must be >= 1");
}

int dynamic_threshold(const std::vector<int>& counts, const SegmenterConfig& cfg) {
  cfg.validate();
  if (counts.empty()) fail(Errc::empty_history, "dynamic_threshold: no count history");

  const std::size_t window =
      std::min(counts.size(), static_cast<std::size_t>(cfg.hist_len));
  std::vector<int> trailing(counts.end() - static_cast<std::ptrdiff_t>(window),
                            counts.end());
  std::sort(trailing.begin(), trailing.end());

  // Nearest-rank: the ceil(q*M)-th smallest, 1-based.
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(cfg.quantile * static_cast<double>(window)));
  const int q_value = trailing[std::clamp<std::size_t>(rank, 1, window) - 1];
  return std::max(cfg.floor, q_value);
}

FrameClass classify_frame(int count, int p_thr) {
  return count >= p_thr ? FrameClass::Motion : FrameClass::Static;
}

std::vector<Segment> segment_stream(const FrameStream& s, const SegmenterConfig& cfg) {
  cfg.validate();
  const std::size_t n_frames = s.frames.size();
  if (n_frames < static_cast<std::size_t>(cfg.win_len))
    fail(Errc::stream_too_short, "segment_stream: fewer frames than the window length");
  for (std::size_t i = 1; i < n_frames; ++i)
    if (s.frames[i].index <= s.frames[i - 1].index)
      fail(Errc::non_monotone_frames, "segment_stream: frame indices not increasing");

  const std::size_t win = static_cast<std::size_t>(cfg.win_len);
  std::vector<char> motion(n_frames, 0);
  std::vector<int> idle_counts;  // counts of frames outside any segment, in order
  idle_counts.reserve(n_frames);

  enum class State { Idle, InMotion };
  State state = State::Idle;
  std::size_t start_pos = 0;
  std::size_t last_motion_pos = 0;
  int frozen_thr = cfg.floor;
  std::size_t idle_run = 0;  // idle_counts entries contributed since last close

  std::vector<Segment> out;
  const auto emit = [&](std::size_t from, std::size_t to) {
    Segment seg;
    seg.start_frame = s.frames[from].index;
    seg.end_frame = s.frames[to].index;
    seg.frame_count = static_cast<int>(to - from + 1);
    seg.threshold_used = frozen_thr;
    out.push_back(seg);
  };

  for (std::size_t i = 0; i < n_frames; ++i) {
    const int count = static_cast<int>(s.frames[i].points.size());

    if (state == State::Idle) {
      idle_counts.push_back(count);
      ++idle_run;
      const int p_thr = dynamic_threshold(idle_counts, cfg);
      motion[i] = classify_frame(count, p_thr) == FrameClass::Motion;

      if (i + 1 >= win) {
        const std::size_t w_begin = i + 1 - win;
        int in_window = 0;
        for (std::size_t j = w_begin; j <= i; ++j) in_window += motion[j];
        if (in_window >= cfg.min_motion) {
          for (start_pos = w_begin; !motion[start_pos]; ++start_pos) {}
          for (last_motion_pos = i; !motion[last_motion_pos]; --last_motion_pos) {}
          // Frames from the segment start onward leave the threshold history.
          const std::size_t reclaim = std::min(idle_run, i - start_pos + 1);
          idle_counts.resize(idle_counts.size() - reclaim);
          frozen_thr = p_thr;
          state = State::InMotion;
        }
      }
    } else {
      motion[i] = classify_frame(count, frozen_thr) == FrameClass::Motion;
      if (motion[i]) last_motion_pos = i;

      bool all_static = i + 1 >= win;
      for (std::size_t j = i + 1 - win; all_static && j <= i; ++j)
        if (motion[j]) all_static = false;

      if (all_static) {
        emit(start_pos, last_motion_pos);
        // The static tail after the segment returns to the threshold history.
        idle_run = 0;
        for (std::size_t j = last_motion_pos + 1; j <= i; ++j) {
          idle_counts.push_back(static_cast<int>(s.frames[j].points.size()));
          ++idle_run;
        }
        state = State::Idle;
      }
    }
  }

  if (state == State::InMotion) emit(start_pos, last_motion_pos);
  return out;
}

GestureCloud aggregate_segment(const FrameStream& s, const Segment& seg) {
  if (s.frames.empty() || seg.start_frame > seg.end_frame ||
      seg.start_frame < s.frames.front().index || seg.end_frame > s.frames.back().index)
    fail(Errc::segment_out_of_range, "aggregate_segment: segment outside the stream");

  GestureCloud cloud;
  cloud.start_frame = seg.start_frame;
  cloud.end_frame = seg.end_frame;
  cloud.source = "frames " + std::to_string(seg.start_frame) + ".." +
                 std::to_string(seg.end_frame);
  for (const Frame& f : s.frames) {
    if (f.index < seg.start_frame || f.index > seg.end_frame) continue;
    cloud.points.insert(cloud.points.end(), f.points.begin(), f.points.end());
  }
  return cloud;
}

}  // namespace mmgest
