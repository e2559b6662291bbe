#pragma once

#include <vector>

#include "mmgest/types.hpp"

namespace mmgest {

struct SegmenterConfig {
  int hist_len = 50;      // N: frames of count history behind the threshold
  int win_len = 10;       // n: sliding motion-detection window
  int min_motion = 8;     // F_Thr: motion frames required inside the window
  double quantile = 0.7;  // q: nearest-rank quantile of the count history
  int floor = 3;          // P_min: lower bound on the threshold

  void validate() const;
};

struct Segment {
  int start_frame = 0;
  int end_frame = 0;
  int frame_count = 0;
  int threshold_used = 0;  // P_Thr frozen at motion onset
};

enum class FrameClass { Motion, Static };

// P_Thr = max(floor, ceil(nearest-rank q-quantile of the trailing
// min(hist_len, |counts|) entries)).
int dynamic_threshold(const std::vector<int>& counts, const SegmenterConfig& cfg);

// Boundary counts as motion: Motion iff count >= p_thr.
FrameClass classify_frame(int count, int p_thr);

// Two-state sweep over the stream. In IDLE the threshold is recomputed after
// every frame from the trailing counts of frames outside any segment (the
// current frame included); a frame is classified against the threshold
// current when it arrives. When the last win_len frames hold >= min_motion
// motion frames, a segment opens at the earliest motion frame of that window
// and the threshold freezes. The segment closes once the last win_len frames
// are all static, ending at the last motion frame; a segment still open at
// stream end is emitted the same way. Detection starts at frame win_len - 1.
std::vector<Segment> segment_stream(const FrameStream& s, const SegmenterConfig& cfg);

// Concatenate the points of frames start_frame..end_frame, frame order then
// intra-frame order.
GestureCloud aggregate_segment(const FrameStream& s, const Segment& seg);

}  // namespace mmgest
