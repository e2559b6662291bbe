#pragma once

#include <string>
#include <vector>

#include "mmgest/denoise.hpp"
#include "mmgest/net.hpp"
#include "mmgest/segment.hpp"
#include "mmgest/train.hpp"
#include "mmgest/types.hpp"

namespace mmgest {

// Recognize the gesture first, then identify the user with that gesture's
// dedicated model (the default runtime mode).
struct SerializedBundle {
  ModelParams gr_model;                 // classes = gestures
  std::vector<ModelParams> ui_models;   // index = gesture, classes = users

  void validate() const;
};

// One user model trained across all gestures.
struct ParallelBundle {
  ModelParams gr_model;
  ModelParams ui_model;
};

struct PipelineConfig {
  SegmenterConfig segmenter;
  DenoiseConfig denoise;
  std::uint64_t seed = 0;  // drives the per-segment resampling
};

struct InferRecord {
  Segment segment;
  bool skipped = false;
  std::string skip_reason;
  int gesture = -1;
  int user = -1;
  Eigen::VectorXd gesture_scores;  // softmax probabilities
  Eigen::VectorXd user_scores;
  int ui_model_used = -1;  // serialized: which per-gesture model answered
};

// One gesture model over all samples plus one user model per gesture, all via
// train(); every (gesture, user) cell must be populated.
SerializedBundle train_serialized(const Dataset& data, const NetConfig& net_template,
                                  const TrainConfig& gr_cfg, const TrainConfig& ui_cfg);

// One gesture model plus a single user model trained across all gestures.
ParallelBundle train_parallel(const Dataset& data, const NetConfig& net_template,
                              const TrainConfig& gr_cfg, const TrainConfig& ui_cfg);

// segment -> denoise -> center -> resample -> classify. Segments whose
// denoising finds no cluster are reported as skipped records.
std::vector<InferRecord> infer(const SerializedBundle& bundle, const FrameStream& stream,
                               const PipelineConfig& cfg);
std::vector<InferRecord> infer(const ParallelBundle& bundle, const FrameStream& stream,
                               const PipelineConfig& cfg);

// Single-cloud classification helpers shared by inference and evaluation.
struct CloudDecision {
  int label = -1;
  Eigen::VectorXd scores;
};
CloudDecision classify_cloud(const ModelParams& model, const GestureCloud& denoised,
                             std::uint64_t resample_seed);

}  // namespace mmgest
