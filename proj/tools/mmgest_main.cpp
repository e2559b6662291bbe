// mmgest: mmWave gesture point-cloud pipeline CLI.
//
// Subcommands: synth, segment, denoise, metrics, train, infer, eval,
// grad-check. Every subcommand takes --config FILE (key=value lines using the
// long option names; see configs/example.cfg). Exit codes: 0 success,
// 1 validation/usage error, 2 runtime error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "mmgest/eval.hpp"
#include "mmgest/metrics.hpp"
#include "mmgest/model_io.hpp"
#include "mmgest/pipeline.hpp"
#include "mmgest/rng.hpp"
#include "mmgest/stream_io.hpp"
#include "mmgest/synth.hpp"
#include "mmgest/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmgest;

namespace {

// "centers;radius,group,w1,w2;radius,group,w1,..." -> SABlockSpec
SABlockSpec parse_block_spec(const std::string& text) {
  SABlockSpec spec;
  spec.scales.clear();
  std::istringstream in(text);
  std::string part;
  if (!std::getline(in, part, ';'))
    fail(Errc::bad_config, "block spec: missing center count");
  spec.centers = std::stoi(part);
  while (std::getline(in, part, ';')) {
    std::istringstream scale_in(part);
    std::string field;
    ScaleSpec scale;
    scale.mlp_widths.clear();
    if (!std::getline(scale_in, field, ',')) fail(Errc::bad_config, "block spec: radius");
    scale.radius = std::stod(field);
    if (!std::getline(scale_in, field, ','))
      fail(Errc::bad_config, "block spec: group size");
    scale.group_size = std::stoi(field);
    while (std::getline(scale_in, field, ','))
      scale.mlp_widths.push_back(std::stoi(field));
    if (scale.mlp_widths.empty()) fail(Errc::bad_config, "block spec: MLP widths");
    spec.scales.push_back(std::move(scale));
  }
  if (spec.scales.empty()) fail(Errc::bad_config, "block spec: no scales");
  return spec;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(std::stoi(field));
  return out;
}

struct NetOptions {
  std::string preset = "compact";
  int points = -1;
  int channels = -1;
  bool no_fuse = false;
  std::string sa1, sa2;
  std::string level_dims;   // "l1,l2"
  std::string global_mlps;  // "w1,w2|w1,w2"
  std::string heads;        // "w1,w2|w1"

  NetConfig build(int num_classes) const {
    NetConfig cfg;
    if (preset == "default") cfg = NetConfig::defaults(num_classes);
    else if (preset == "compact") cfg = NetConfig::compact(num_classes);
    else if (preset == "tiny") cfg = NetConfig::tiny(num_classes);
    else fail(Errc::bad_config, "net preset must be default|compact|tiny");
    if (points > 0) cfg.point_count = points;
    if (channels > 0) cfg.in_channels = channels;
    cfg.fuse = !no_fuse;
    if (!sa1.empty()) cfg.sa1 = parse_block_spec(sa1);
    if (!sa2.empty()) cfg.sa2 = parse_block_spec(sa2);
    if (!level_dims.empty()) {
      const auto dims = parse_int_list(level_dims);
      if (dims.size() != 2) fail(Errc::bad_config, "level dims: need 'l1,l2'");
      cfg.level_dim_l1 = dims[0];
      cfg.level_dim_l2 = dims[1];
    }
    const auto split_pair = [](const std::string& text) {
      const auto bar = text.find('|');
      if (bar == std::string::npos)
        fail(Errc::bad_config, "expected 'list|list' with a '|' separator");
      return std::pair<std::string, std::string>(text.substr(0, bar),
                                                 text.substr(bar + 1));
    };
    if (!global_mlps.empty()) {
      const auto [l1, l2] = split_pair(global_mlps);
      cfg.global_mlp_l1 = parse_int_list(l1);
      cfg.global_mlp_l2 = parse_int_list(l2);
    } else {
      cfg.global_mlp_l1.back() = cfg.level_dim_l1;
      cfg.global_mlp_l2.back() = cfg.level_dim_l2;
    }
    if (!heads.empty()) {
      const auto [h1, h2] = split_pair(heads);
      cfg.head_fc_l1 = parse_int_list(h1);
      cfg.head_fc_l2 = parse_int_list(h2);
    }
    cfg.validate();
    return cfg;
  }
};

void add_net_options(CLI::App* cmd, NetOptions& net) {
  cmd->add_option("--net", net.preset, "architecture preset: default|compact|tiny");
  cmd->add_option("--net-points", net.points, "points per input cloud");
  cmd->add_option("--net-channels", net.channels, "input channels: 5 or 3 (xyz only)");
  cmd->add_flag("--net-no-fuse", net.no_fuse, "disable cross-level attention fusion");
  cmd->add_option("--net-sa1", net.sa1, "sa1 spec 'centers;r,m,w1,..;r,m,w1,..'");
  cmd->add_option("--net-sa2", net.sa2, "sa2 spec");
  cmd->add_option("--net-level-dims", net.level_dims, "level feature dims 'l1,l2'");
  cmd->add_option("--net-global", net.global_mlps, "global MLP widths 'l1|l2'");
  cmd->add_option("--net-heads", net.heads, "head FC widths 'l1|l2'");
}

void add_segmenter_options(CLI::App* cmd, SegmenterConfig& cfg) {
  cmd->add_option("--seg-hist-len", cfg.hist_len, "count history length N");
  cmd->add_option("--seg-win-len", cfg.win_len, "motion window length n");
  cmd->add_option("--seg-min-motion", cfg.min_motion, "minimum motion frames F_Thr");
  cmd->add_option("--seg-quantile", cfg.quantile, "threshold quantile q");
  cmd->add_option("--seg-floor", cfg.floor, "threshold floor P_min");
}

void add_denoise_options(CLI::App* cmd, DenoiseConfig& cfg) {
  cmd->add_option("--dn-dmax", cfg.d_max, "neighborhood radius D_max (m)");
  cmd->add_option("--dn-nmin", cfg.n_min, "minimum cluster population N_min");
}

void add_augment_options(CLI::App* cmd, AugmentConfig& cfg) {
  cmd->add_option("--aug-sigma", cfg.sigma, "jitter displacement std (m)");
  cmd->add_option("--aug-copies", cfg.copies, "augmented copies per sample");
}

void add_train_options(CLI::App* cmd, TrainConfig& cfg, std::string& optimizer) {
  cmd->add_option("--train-lr", cfg.lr, "learning rate");
  cmd->add_option("--train-epochs", cfg.epochs, "epoch count");
  cmd->add_option("--train-batch", cfg.batch, "minibatch size");
  cmd->add_option("--train-split", cfg.split_ratio, "train fraction for splits");
  cmd->add_option("--train-folds", cfg.folds, "cross-validation folds");
  cmd->add_option("--train-threads", cfg.threads, "batch-parallel threads");
  cmd->add_option("--train-optimizer", optimizer,
                  "optimizer: adaptive-moment|plain-sgd");
}

Dataset load_cloud_set(const std::string& path) {
  const json j = json::parse(read_text(path));
  if (j.contains("samples")) return read_dataset(path);
  Dataset single;
  single.num_gestures = 1;
  single.num_users = 1;
  single.samples.push_back({read_cloud(path), 0, 0});
  return single;
}

json bundle_json(const fs::path& dir) {
  const fs::path path = dir / "bundle.json";
  if (!fs::exists(path)) return json::object();
  return json::parse(read_text(path.string()));
}

int run_synth(const std::string& out_dir, int users, int gestures, int samples,
              std::uint64_t seed, double bg_rate, const std::string& scales,
              bool write_streams) {
  SynthDatasetConfig cfg;
  cfg.n_users = users;
  cfg.n_gestures = gestures;
  cfg.samples_per_cell = samples;
  cfg.seed = seed;
  if (bg_rate >= 0.0) cfg.noise.background_rate = bg_rate;
  if (!scales.empty()) {
    cfg.motion_scales.clear();
    std::istringstream in(scales);
    std::string field;
    while (std::getline(in, field, ',')) cfg.motion_scales.push_back(std::stod(field));
  }
  const SynthDataset data = synth_dataset(cfg);

  fs::create_directories(out_dir);
  write_dataset(data.dataset, out_dir);
  if (write_streams) {
    fs::create_directories(fs::path(out_dir) / "streams");
    std::size_t cell = 0;
    for (int g = 0; g < gestures; ++g) {
      for (int u = 0; u < users; ++u, ++cell) {
        const std::string stem = "streams/cell_g" + std::to_string(g) + "_u" +
                                 std::to_string(u);
        write_stream(data.streams[cell].stream,
                     (fs::path(out_dir) / (stem + ".jsonl")).string());
        write_annotations(data.streams[cell].annotations,
                          (fs::path(out_dir) / (stem + ".annotations.json")).string());
      }
    }
  }
  std::cout << "synth: wrote " << data.dataset.samples.size() << " clouds ("
            << gestures << " gestures x " << users << " users x " << samples
            << ") to " << out_dir << "\n";
  return 0;
}

int run_segment(const std::string& in, const std::string& out,
                const SegmenterConfig& cfg) {
  const FrameStream stream = read_stream(in);
  const std::vector<Segment> segments = segment_stream(stream, cfg);
  json arr = json::array();
  for (const Segment& s : segments)
    arr.push_back({{"start", s.start_frame},
                   {"end", s.end_frame},
                   {"frames", s.frame_count},
                   {"threshold", s.threshold_used}});
  const std::string text = arr.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else write_text(text, out);
  std::cerr << "segment: " << segments.size() << " segment(s)\n";
  return 0;
}

int run_denoise(const std::string& in, const std::string& out, const DenoiseConfig& cfg) {
  const GestureCloud cloud = read_cloud(in);
  const GestureCloud main = keep_main_cluster(cloud, cfg);
  write_cloud(main, out);
  std::cout << "denoise: kept " << main.points.size() << " of " << cloud.points.size()
            << " points\n";
  return 0;
}

int run_metrics(const std::string& a_path, const std::string& b_path,
                const std::string& metric, double voxel, const std::string& out) {
  const Dataset a = load_cloud_set(a_path);
  const Dataset b = load_cloud_set(b_path);
  CloudCollection ca, cb;
  for (const LabeledCloud& s : a.samples) ca.clouds.push_back(s.cloud);
  for (const LabeledCloud& s : b.samples) cb.clouds.push_back(s.cloud);

  std::ostringstream csv;
  csv << "metric,value\n";
  csv.precision(17);
  const auto emit = [&](const std::string& name, CloudMetric m) {
    csv << name << ',' << collection_difference(ca, cb, m, voxel) << '\n';
  };
  if (metric == "HD" || metric == "all") emit("HD", CloudMetric::HD);
  if (metric == "CD" || metric == "all") emit("CD", CloudMetric::CD);
  if (metric == "JSD" || metric == "all") emit("JSD", CloudMetric::JSD);
  if (out.empty()) std::cout << csv.str();
  else write_text(csv.str(), out);
  return 0;
}

int run_train(const std::string& manifest, const std::string& task,
              const std::string& mode, const std::string& out_dir, TrainConfig train_cfg,
              const std::string& optimizer, const NetOptions& net_opts) {
  if (optimizer == "plain-sgd") train_cfg.optimizer = Optimizer::PlainSgd;
  else if (optimizer == "adaptive-moment") train_cfg.optimizer = Optimizer::AdaptiveMoment;
  else fail(Errc::bad_config, "train: unknown optimizer '" + optimizer + "'");

  const Dataset data = read_dataset(manifest);
  fs::create_directories(out_dir);
  json bundle = bundle_json(out_dir);
  bundle["mode"] = mode;

  const auto save = [&](const ModelParams& params, const TrainHistory& history,
                        const std::string& stem) {
    save_model(params, (fs::path(out_dir) / (stem + ".model")).string());
    write_history(history, (fs::path(out_dir) / ("history_" + stem + ".csv")).string());
  };

  if (task == "gesture") {
    NetConfig net = net_opts.build(data.num_gestures);
    TrainSet set;
    for (const LabeledCloud& s : data.samples) set.push_back({s.cloud, s.gesture});
    const TrainResult r = train(set, train_cfg, net);
    save(r.params, r.history, "gesture");
    bundle["gesture_model"] = "gesture.model";
    std::cout << "train: gesture model, final train accuracy "
              << r.history.epochs.back().train_accuracy << "\n";
  } else if (task == "user") {
    NetConfig net = net_opts.build(data.num_users);
    if (mode == "serialized") {
      json names = json::array();
      for (int g = 0; g < data.num_gestures; ++g) {
        TrainSet set;
        for (const LabeledCloud& s : data.samples)
          if (s.gesture == g) set.push_back({s.cloud, s.user});
        TrainConfig cfg = train_cfg;
        cfg.seed = mix_seed(train_cfg.seed, static_cast<std::uint64_t>(g));
        const TrainResult r = train(set, cfg, net);
        const std::string stem = "user_g" + std::to_string(g);
        save(r.params, r.history, stem);
        names.push_back(stem + ".model");
      }
      bundle["user_models"] = names;
      std::cout << "train: " << data.num_gestures << " serialized user models\n";
    } else if (mode == "parallel") {
      TrainSet set;
      for (const LabeledCloud& s : data.samples) set.push_back({s.cloud, s.user});
      const TrainResult r = train(set, train_cfg, net);
      save(r.params, r.history, "user_all");
      bundle["user_model"] = "user_all.model";
      std::cout << "train: parallel user model\n";
    } else {
      fail(Errc::bad_config, "train: mode must be serialized|parallel");
    }
  } else {
    fail(Errc::bad_config, "train: task must be gesture|user");
  }

  write_text(bundle.dump(2) + "\n", (fs::path(out_dir) / "bundle.json").string());
  return 0;
}

int run_infer(const std::string& bundle_dir, const std::string& in,
              const std::string& out, const PipelineConfig& cfg) {
  const json bundle = bundle_json(bundle_dir);
  if (bundle.empty()) fail(Errc::parse_error, "infer: no bundle.json in " + bundle_dir);
  const std::string mode = bundle.at("mode").get<std::string>();
  const fs::path dir(bundle_dir);
  const FrameStream stream = read_stream(in);

  std::vector<InferRecord> records;
  if (mode == "serialized") {
    SerializedBundle b;
    b.gr_model = load_model((dir / bundle.at("gesture_model").get<std::string>()).string());
    for (const auto& name : bundle.at("user_models"))
      b.ui_models.push_back(load_model((dir / name.get<std::string>()).string()));
    records = infer(b, stream, cfg);
  } else if (mode == "parallel") {
    ParallelBundle b;
    b.gr_model = load_model((dir / bundle.at("gesture_model").get<std::string>()).string());
    b.ui_model = load_model((dir / bundle.at("user_model").get<std::string>()).string());
    records = infer(b, stream, cfg);
  } else {
    fail(Errc::bad_config, "infer: bundle mode must be serialized|parallel");
  }

  if (out.empty()) std::cout << infer_records_to_string(records);
  else write_infer_records(records, out);
  std::size_t skipped = 0;
  for (const InferRecord& r : records) skipped += r.skipped;
  std::cerr << "infer: " << records.size() << " segment(s), " << skipped
            << " skipped\n";
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& truth_path,
             const std::string& out, const std::string& roc_out) {
  const std::vector<InferRecord> records = read_infer_records(pred_path);
  const std::vector<TruthRecord> truth = read_truth(truth_path);
  if (records.size() != truth.size())
    fail(Errc::length_mismatch, "eval: predictions and truth differ in length");
  if (records.empty()) fail(Errc::empty_dataset, "eval: nothing to evaluate");

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!records[i].skipped) kept.push_back(i);
  if (kept.empty()) fail(Errc::empty_dataset, "eval: every record was skipped");

  const int n_gestures = static_cast<int>(records[kept[0]].gesture_scores.size());
  const int n_users = static_cast<int>(records[kept[0]].user_scores.size());
  bool serialized = records[kept[0]].ui_model_used >= 0;

  std::vector<int> g_truth, g_pred, u_truth, u_pred;
  Eigen::MatrixXd g_scores(static_cast<Eigen::Index>(kept.size()), n_gestures);
  Eigen::MatrixXd u_scores(static_cast<Eigen::Index>(kept.size()), n_users);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const InferRecord& r = records[kept[k]];
    g_truth.push_back(truth[kept[k]].gesture);
    g_pred.push_back(r.gesture);
    u_truth.push_back(truth[kept[k]].user);
    u_pred.push_back(r.user);
    g_scores.row(static_cast<Eigen::Index>(k)) = r.gesture_scores.transpose();
    u_scores.row(static_cast<Eigen::Index>(k)) = r.user_scores.transpose();
  }

  const EvalReport gr = classification_metrics(g_truth, g_pred, g_scores, false);

  json ui_json;
  if (serialized) {
    // Per-gesture user reports averaged unweighted, routing errors included.
    std::vector<EvalReport> per_gesture;
    json per_gesture_json = json::array();
    for (int g = 0; g < n_gestures; ++g) {
      std::vector<int> t, p;
      std::vector<Eigen::Index> rows;
      for (std::size_t k = 0; k < kept.size(); ++k)
        if (g_truth[k] == g) {
          t.push_back(u_truth[k]);
          p.push_back(u_pred[k]);
          rows.push_back(static_cast<Eigen::Index>(k));
        }
      if (t.empty()) continue;
      Eigen::MatrixXd scores(static_cast<Eigen::Index>(rows.size()), n_users);
      for (std::size_t i = 0; i < rows.size(); ++i) scores.row(i) = u_scores.row(rows[i]);
      const EvalReport rep = classification_metrics(t, p, scores, false);
      per_gesture.push_back(rep);
      per_gesture_json.push_back({{"gesture", g},
                                  {"accuracy", rep.accuracy},
                                  {"macro_f1", rep.macro_f1},
                                  {"macro_auc", rep.macro_auc}});
    }
    double f1 = 0.0, auc = 0.0;
    for (const EvalReport& r : per_gesture) {
      f1 += r.macro_f1;
      auc += r.macro_auc;
    }
    ui_json = {{"uia", uia_serialized(per_gesture)},
               {"uif1", f1 / per_gesture.size()},
               {"uiauc", auc / per_gesture.size()},
               {"per_gesture", per_gesture_json}};
  } else {
    const EvalReport ui = classification_metrics(u_truth, u_pred, u_scores, false);
    ui_json = {{"uia", ui.accuracy}, {"uif1", ui.macro_f1}, {"uiauc", ui.macro_auc}};
  }

  // Per-user verification pools from the softmax scores.
  std::vector<ScoreSet> pools(static_cast<std::size_t>(n_users));
  for (std::size_t k = 0; k < kept.size(); ++k)
    for (int u = 0; u < n_users; ++u)
      (u_truth[k] == u ? pools[static_cast<std::size_t>(u)].genuine
                       : pools[static_cast<std::size_t>(u)].impostor)
          .push_back(u_scores(static_cast<Eigen::Index>(k), u));
  json per_user_eer = json::array();
  std::string roc_csv;
  double eer_sum = 0.0;
  int eer_users = 0;
  for (int u = 0; u < n_users; ++u) {
    const ScoreSet& pool = pools[static_cast<std::size_t>(u)];
    if (pool.genuine.empty() || pool.impostor.empty()) continue;  // no verification trial
    const EerResult r = eer(pool);
    per_user_eer.push_back({{"user", u}, {"eer", r.eer}, {"threshold", r.threshold}});
    eer_sum += r.eer;
    if (!roc_out.empty()) {
      const std::string rows = roc_to_csv(roc_points(pool), u);
      roc_csv += roc_csv.empty() ? rows : rows.substr(rows.find('\n') + 1);
    }
    ++eer_users;
  }

  json report = {{"records", records.size()},
                 {"skipped", records.size() - kept.size()},
                 {"gr",
                  {{"gra", gr.accuracy},
                   {"grf1", gr.macro_f1},
                   {"grauc", gr.macro_auc},
                   {"confusion", json::parse(eval_report_to_json(gr)).at("confusion")}}},
                 {"ui", ui_json},
                 {"eer",
                  {{"mean", eer_users > 0
                                ? json(eer_sum / eer_users)
                                : json()},
                   {"per_user", per_user_eer}}}};
  const std::string text = report.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else write_text(text, out);
  if (!roc_out.empty()) write_text(roc_csv, roc_out);
  return 0;
}

int run_grad_check(std::uint64_t seed, int classes, int points) {
  NetConfig cfg = NetConfig::tiny(classes);
  if (points > 0) cfg.point_count = points;
  const GradCheckReport report = gradient_check(cfg, seed);
  std::cout << "block max_rel_err\n";
  for (const GradCheckBlock& b : report.blocks)
    std::cout << b.name << ' ' << b.max_rel_err << '\n';
  std::cout << "max relative error = " << report.max_rel_err << '\n'
            << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave gesture recognition and user identification pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  std::string synth_out = "synth_out";
  int synth_users = 8, synth_gestures = 5, synth_samples = 20;
  std::uint64_t synth_seed = 1;
  double synth_bg = -1.0;
  std::string synth_scales;
  bool synth_streams = false;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--users", synth_users, "user count");
  synth->add_option("--gestures", synth_gestures, "gesture count");
  synth->add_option("--samples", synth_samples, "samples per (gesture,user) cell");
  synth->add_option("--seed", synth_seed, "RNG seed");
  synth->add_option("--bg-rate", synth_bg, "background clutter rate per frame");
  synth->add_option("--scales", synth_scales, "explicit motion scales 's1,s2,...'");
  synth->add_flag("--write-streams", synth_streams, "also write raw streams+annotations");
  synth->set_config("--config");

  // segment
  auto* segment = app.add_subcommand("segment", "detect gesture segments in a stream");
  std::string seg_in, seg_out;
  SegmenterConfig seg_cfg;
  segment->add_option("--in", seg_in, "input stream (jsonl)")->required();
  segment->add_option("--out", seg_out, "output segments json (default stdout)");
  add_segmenter_options(segment, seg_cfg);
  segment->set_config("--config");

  // denoise
  auto* denoise = app.add_subcommand("denoise", "keep a cloud's main density cluster");
  std::string dn_in, dn_out;
  DenoiseConfig dn_cfg;
  denoise->add_option("--in", dn_in, "input cloud json")->required();
  denoise->add_option("--out", dn_out, "output cloud json")->required();
  add_denoise_options(denoise, dn_cfg);
  denoise->set_config("--config");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "cloud-set difference metrics to CSV");
  std::string met_a, met_b, met_name = "all", met_out;
  double met_voxel = 0.1;
  metrics->add_option("--a", met_a, "first cloud set (manifest or cloud json)")->required();
  metrics->add_option("--b", met_b, "second cloud set")->required();
  metrics->add_option("--metric", met_name, "HD|CD|JSD|all");
  metrics->add_option("--voxel", met_voxel, "JSD voxel edge (m)");
  metrics->add_option("--out", met_out, "output csv (default stdout)");
  metrics->set_config("--config");

  // train
  auto* train_cmd = app.add_subcommand("train", "train classification models");
  std::string tr_manifest, tr_task, tr_mode = "serialized", tr_out = "bundle";
  TrainConfig tr_cfg;
  std::string tr_optimizer = "adaptive-moment";
  NetOptions tr_net;
  train_cmd->add_option("--manifest", tr_manifest, "dataset manifest")->required();
  train_cmd->add_option("--task", tr_task, "gesture|user")->required();
  train_cmd->add_option("--mode", tr_mode, "serialized|parallel");
  train_cmd->add_option("--out", tr_out, "bundle output directory");
  train_cmd->add_option("--seed", tr_cfg.seed, "RNG seed");
  add_train_options(train_cmd, tr_cfg, tr_optimizer);
  add_augment_options(train_cmd, tr_cfg.augment);
  add_net_options(train_cmd, tr_net);
  train_cmd->set_config("--config");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "run the pipeline over a stream");
  std::string inf_bundle, inf_in, inf_out;
  PipelineConfig inf_cfg;
  infer_cmd->add_option("--bundle", inf_bundle, "bundle directory")->required();
  infer_cmd->add_option("--in", inf_in, "input stream (jsonl)")->required();
  infer_cmd->add_option("--out", inf_out, "output records jsonl (default stdout)");
  infer_cmd->add_option("--seed", inf_cfg.seed, "resampling seed");
  add_segmenter_options(infer_cmd, inf_cfg.segmenter);
  add_denoise_options(infer_cmd, inf_cfg.denoise);
  infer_cmd->set_config("--config");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against truth");
  std::string ev_pred, ev_truth, ev_out, ev_roc;
  eval_cmd->add_option("--pred", ev_pred, "predictions jsonl")->required();
  eval_cmd->add_option("--truth", ev_truth, "truth jsonl")->required();
  eval_cmd->add_option("--out", ev_out, "report json (default stdout)");
  eval_cmd->add_option("--roc", ev_roc, "per-user ROC csv");
  eval_cmd->set_config("--config");

  // grad-check
  auto* grad = app.add_subcommand("grad-check", "finite-difference gradient check");
  std::uint64_t gc_seed = 1;
  int gc_classes = 2, gc_points = -1;
  grad->add_option("--seed", gc_seed, "RNG seed");
  grad->add_option("--classes", gc_classes, "class count (tiny config)");
  grad->add_option("--points", gc_points, "points per cloud");
  grad->set_config("--config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (synth->parsed())
      return run_synth(synth_out, synth_users, synth_gestures, synth_samples, synth_seed,
                       synth_bg, synth_scales, synth_streams);
    if (segment->parsed()) return run_segment(seg_in, seg_out, seg_cfg);
    if (denoise->parsed()) return run_denoise(dn_in, dn_out, dn_cfg);
    if (metrics->parsed())
      return run_metrics(met_a, met_b, met_name, met_voxel, met_out);
    if (train_cmd->parsed())
      return run_train(tr_manifest, tr_task, tr_mode, tr_out, tr_cfg, tr_optimizer,
                       tr_net);
    if (infer_cmd->parsed()) return run_infer(inf_bundle, inf_in, inf_out, inf_cfg);
    if (eval_cmd->parsed()) return run_eval(ev_pred, ev_truth, ev_out, ev_roc);
    if (grad->parsed()) return run_grad_check(gc_seed, gc_classes, gc_points);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
