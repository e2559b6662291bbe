#include "mmgest/pipeline.hpp"

#include "mmgest/cloud_ops.hpp"
#include "mmgest/rng.hpp"

namespace mmgest {

namespace {

constexpr std::uint64_t kInferSalt = 0x1f3e;

TrainSet gesture_view(const Dataset& data) {
  TrainSet set;
  set.reserve(data.samples.size());
  for (const LabeledCloud& s : data.samples) set.push_back({s.cloud, s.gesture});
  return set;
}

TrainSet user_view(const Dataset& data, int gesture_filter) {
  TrainSet set;
  for (const LabeledCloud& s : data.samples)
    if (gesture_filter < 0 || s.gesture == gesture_filter)
      set.push_back({s.cloud, s.user});
  return set;
}

void check_cells(const Dataset& data) {
  if (data.samples.empty()) fail(Errc::empty_dataset, "train bundle: empty dataset");
  std::vector<int> cell_counts(
      static_cast<std::size_t>(data.num_gestures) * data.num_users, 0);
  for (const LabeledCloud& s : data.samples) {
    if (s.gesture < 0 || s.gesture >= data.num_gestures || s.user < 0 ||
        s.user >= data.num_users)
      fail(Errc::label_out_of_range, "train bundle: sample label outside label space");
    ++cell_counts[static_cast<std::size_t>(s.gesture) * data.num_users + s.user];
  }
  for (int g = 0; g < data.num_gestures; ++g)
    for (int u = 0; u < data.num_users; ++u)
      if (cell_counts[static_cast<std::size_t>(g) * data.num_users + u] == 0)
        fail(Errc::empty_cell, "train bundle: empty gesture " + std::to_string(g) +
                                   " x user " + std::to_string(u) + " cell");
}

}  // namespace

void SerializedBundle::validate() const {
  if (static_cast<int>(ui_models.size()) != gr_model.config().num_classes)
    fail(Errc::shape_mismatch,
         "SerializedBundle: one user model per gesture class required");
}

SerializedBundle train_serialized(const Dataset& data, const NetConfig& net_template,
                                  const TrainConfig& gr_cfg, const TrainConfig& ui_cfg) {
  check_cells(data);
  SerializedBundle bundle;

  NetConfig gr_net = net_template;
  gr_net.num_classes = data.num_gestures;
  bundle.gr_model = train(gesture_view(data), gr_cfg, gr_net).params;

  NetConfig ui_net = net_template;
  ui_net.num_classes = data.num_users;
  for (int g = 0; g < data.num_gestures; ++g) {
    TrainConfig cfg = ui_cfg;
    cfg.seed = mix_seed(ui_cfg.seed, static_cast<std::uint64_t>(g));
    bundle.ui_models.push_back(train(user_view(data, g), cfg, ui_net).params);
  }
  bundle.validate();
  return bundle;
}

ParallelBundle train_parallel(const Dataset& data, const NetConfig& net_template,
                              const TrainConfig& gr_cfg, const TrainConfig& ui_cfg) {
  check_cells(data);
  ParallelBundle bundle;

  NetConfig gr_net = net_template;
  gr_net.num_classes = data.num_gestures;
  bundle.gr_model = train(gesture_view(data), gr_cfg, gr_net).params;

  NetConfig ui_net = net_template;
  ui_net.num_classes = data.num_users;
  bundle.ui_model = train(user_view(data, -1), ui_cfg, ui_net).params;
  return bundle;
}

CloudDecision classify_cloud(const ModelParams& model, const GestureCloud& denoised,
                             std::uint64_t resample_seed) {
  GestureCloud c = normalize_center(denoised);
  c = resample_fixed(c, model.config().point_count, resample_seed);
  CloudDecision out;
  out.scores = softmax(forward(model, c).logits1);
  out.label = argmax_lowest(out.scores);
  return out;
}

namespace {

template <typename UserModelFor>
std::vector<InferRecord> infer_impl(const ModelParams& gr_model, UserModelFor user_model,
                                    const FrameStream& stream, const PipelineConfig& cfg) {
  std::vector<InferRecord> records;
  const std::vector<Segment> segments = segment_stream(stream, cfg.segmenter);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    InferRecord rec;
    rec.segment = segments[i];
    const std::uint64_t seed = mix_seed(cfg.seed, mix_seed(kInferSalt, i));
    try {
      const GestureCloud denoised =
          keep_main_cluster(aggregate_segment(stream, segments[i]), cfg.denoise);
      const CloudDecision g = classify_cloud(gr_model, denoised, seed);
      rec.gesture = g.label;
      rec.gesture_scores = g.scores;
      const auto& [ui_model, ui_index] = user_model(g.label);
      const CloudDecision u = classify_cloud(ui_model, denoised, seed);
      rec.user = u.label;
      rec.user_scores = u.scores;
      rec.ui_model_used = ui_index;
    } catch (const Error& e) {
      if (e.code() != Errc::no_cluster) throw;
      rec.skipped = true;
      rec.skip_reason = e.what();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<InferRecord> infer(const SerializedBundle& bundle, const FrameStream& stream,
                               const PipelineConfig& cfg) {
  bundle.validate();
  return infer_impl(
      bundle.gr_model,
      [&](int gesture) {
        return std::pair<const ModelParams&, int>(
            bundle.ui_models[static_cast<std::size_t>(gesture)], gesture);
      },
      stream, cfg);
}

std::vector<InferRecord> infer(const ParallelBundle& bundle, const FrameStream& stream,
                               const PipelineConfig& cfg) {
  return infer_impl(
      bundle.gr_model,
      [&](int) { return std::pair<const ModelParams&, int>(bundle.ui_model, -1); },
      stream, cfg);
}

}  // namespace mmgest
