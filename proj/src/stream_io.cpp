#include "mmgest/stream_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmgest {

namespace {

using nlohmann::json;

json parse_line(const std::string& line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    fail(Errc::parse_error,
         "line " + std::to_string(line_no) + ": " + std::string(e.what()));
  }
}

json point_to_json(const Point& p) {
  return json::array({p.x, p.y, p.z, p.doppler, p.intensity});
}

Point point_from_json(const json& j, std::size_t line_no) {
  if (!j.is_array() || j.size() != 5)
    fail(Errc::parse_error, "line " + std::to_string(line_no) + ": point needs 5 numbers");
  Point p;
  p.x = j[0].get<double>();
  p.y = j[1].get<double>();
  p.z = j[2].get<double>();
  p.doppler = j[3].get<double>();
  p.intensity = j[4].get<double>();
  return p;
}

}  // namespace

std::string stream_to_string(const FrameStream& s) {
  std::string out;
  json header = {{"frame_rate", s.frame_rate}, {"meta", json::object()}};
  for (const auto& [k, v] : s.meta) header["meta"][k] = v;
  out += header.dump();
  out += '\n';
  for (const Frame& f : s.frames) {
    json points = json::array();
    for (const Point& p : f.points) points.push_back(point_to_json(p));
    out += json{{"frame", f.index}, {"t", f.t}, {"points", points}}.dump();
    out += '\n';
  }
  return out;
}

FrameStream stream_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  FrameStream s;
  if (!std::getline(in, line)) fail(Errc::parse_error, "stream: empty input");
  ++line_no;
  const json header = parse_line(line, line_no);
  s.frame_rate = header.at("frame_rate").get<double>();
  if (!(s.frame_rate > 0.0)) fail(Errc::parse_error, "stream: frame_rate must be > 0");
  if (header.contains("meta"))
    for (const auto& [k, v] : header.at("meta").items())
      s.meta[k] = v.get<std::string>();

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = parse_line(line, line_no);
    Frame f;
    f.index = j.at("frame").get<int>();
    f.t = j.at("t").get<double>();
    if (f.index < 0)
      fail(Errc::parse_error, "line " + std::to_string(line_no) + ": negative frame index");
    if (!s.frames.empty() && f.index <= s.frames.back().index)
      fail(Errc::non_monotone_frames,
           "line " + std::to_string(line_no) + ": frame indices must increase");
    if (std::abs(f.t - f.index / s.frame_rate) > 1e-9 * (1.0 + std::abs(f.t)))
      fail(Errc::parse_error,
           "line " + std::to_string(line_no) + ": t must equal frame/frame_rate");
    for (const auto& pj : j.at("points")) f.points.push_back(point_from_json(pj, line_no));
    s.frames.push_back(std::move(f));
  }
  return s;
}

void write_stream(const FrameStream& s, const std::string& path) {
  write_text(stream_to_string(s), path);
}

FrameStream read_stream(const std::string& path) {
  return stream_from_string(read_text(path));
}

void write_cloud(const GestureCloud& c, const std::string& path) {
  json points = json::array();
  for (const Point& p : c.points) points.push_back(point_to_json(p));
  const json j = {{"start_frame", c.start_frame},
                  {"end_frame", c.end_frame},
                  {"source", c.source},
                  {"points", points}};
  write_text(j.dump() + "\n", path);
}

GestureCloud read_cloud(const std::string& path) {
  const json j = parse_line(read_text(path), 1);
  GestureCloud c;
  c.start_frame = j.at("start_frame").get<int>();
  c.end_frame = j.at("end_frame").get<int>();
  c.source = j.value("source", std::string{});
  for (const auto& pj : j.at("points")) c.points.push_back(point_from_json(pj, 1));
  return c;
}

void write_dataset(const Dataset& data, const std::string& dir,
                   const std::string& manifest_name) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "clouds");
  json samples = json::array();
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const LabeledCloud& s = data.samples[i];
    const std::string rel = "clouds/cloud_" + std::to_string(i) + ".json";
    write_cloud(s.cloud, (fs::path(dir) / rel).string());
    samples.push_back({{"cloud", rel}, {"gesture", s.gesture}, {"user", s.user}});
  }
  const json manifest = {{"num_gestures", data.num_gestures},
                         {"num_users", data.num_users},
                         {"samples", samples}};
  write_text(manifest.dump(2) + "\n", (fs::path(dir) / manifest_name).string());
}

Dataset read_dataset(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  const json manifest = parse_line(read_text(manifest_path), 1);
  Dataset data;
  data.num_gestures = manifest.at("num_gestures").get<int>();
  data.num_users = manifest.at("num_users").get<int>();
  const fs::path base = fs::path(manifest_path).parent_path();
  for (const auto& sj : manifest.at("samples")) {
    LabeledCloud s;
    s.cloud = read_cloud((base / sj.at("cloud").get<std::string>()).string());
    s.gesture = sj.at("gesture").get<int>();
    s.user = sj.at("user").get<int>();
    if (s.gesture < 0 || s.gesture >= data.num_gestures || s.user < 0 ||
        s.user >= data.num_users)
      fail(Errc::parse_error, "manifest: sample labels outside the dictionaries");
    data.samples.push_back(std::move(s));
  }
  return data;
}

void write_annotations(const OracleAnnotations& ann, const std::string& path) {
  json events = json::array();
  for (const OracleEvent& e : ann.events)
    events.push_back({{"start", e.start_frame},
                      {"end", e.end_frame},
                      {"gesture", e.gesture_id},
                      {"user", e.user_id}});
  json prov = json::array();
  for (const auto& frame_flags : ann.provenance)
    prov.push_back(std::vector<int>(frame_flags.begin(), frame_flags.end()));
  write_text(json{{"events", events}, {"provenance", prov}}.dump() + "\n", path);
}

OracleAnnotations read_annotations(const std::string& path) {
  const json j = parse_line(read_text(path), 1);
  OracleAnnotations ann;
  for (const auto& ej : j.at("events"))
    ann.events.push_back({ej.at("start").get<int>(), ej.at("end").get<int>(),
                          ej.at("gesture").get<int>(), ej.at("user").get<int>()});
  for (const auto& fj : j.at("provenance")) {
    std::vector<std::uint8_t> flags;
    for (const auto& v : fj) flags.push_back(static_cast<std::uint8_t>(v.get<int>()));
    ann.provenance.push_back(std::move(flags));
  }
  return ann;
}

std::string infer_records_to_string(const std::vector<InferRecord>& records) {
  std::string out;
  for (const InferRecord& r : records) {
    json j = {{"start", r.segment.start_frame},
              {"end", r.segment.end_frame},
              {"frames", r.segment.frame_count},
              {"threshold", r.segment.threshold_used},
              {"skipped", r.skipped}};
    if (r.skipped) {
      j["reason"] = r.skip_reason;
    } else {
      j["gesture"] = r.gesture;
      j["user"] = r.user;
      j["ui_model"] = r.ui_model_used;
      j["gesture_scores"] =
          std::vector<double>(r.gesture_scores.data(),
                              r.gesture_scores.data() + r.gesture_scores.size());
      j["user_scores"] = std::vector<double>(
          r.user_scores.data(), r.user_scores.data() + r.user_scores.size());
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_infer_records(const std::vector<InferRecord>& records,
                         const std::string& path) {
  write_text(infer_records_to_string(records), path);
}

std::vector<InferRecord> read_infer_records(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<InferRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = parse_line(line, line_no);
    InferRecord r;
    r.segment.start_frame = j.at("start").get<int>();
    r.segment.end_frame = j.at("end").get<int>();
    r.segment.frame_count = j.value("frames", 0);
    r.segment.threshold_used = j.value("threshold", 0);
    r.skipped = j.at("skipped").get<bool>();
    if (r.skipped) {
      r.skip_reason = j.value("reason", std::string{});
    } else {
      r.gesture = j.at("gesture").get<int>();
      r.user = j.at("user").get<int>();
      r.ui_model_used = j.value("ui_model", -1);
      const auto gs = j.at("gesture_scores").get<std::vector<double>>();
      const auto us = j.at("user_scores").get<std::vector<double>>();
      r.gesture_scores = Eigen::Map<const Eigen::VectorXd>(gs.data(),
                                                           static_cast<Eigen::Index>(gs.size()));
      r.user_scores =
          Eigen::Map<const Eigen::VectorXd>(us.data(), static_cast<Eigen::Index>(us.size()));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_truth(const std::vector<TruthRecord>& truth, const std::string& path) {
  std::string out;
  for (const TruthRecord& t : truth) {
    out += json{{"gesture", t.gesture}, {"user", t.user}}.dump();
    out += '\n';
  }
  write_text(out, path);
}

std::vector<TruthRecord> read_truth(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<TruthRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = parse_line(line, line_no);
    out.push_back({j.at("gesture").get<int>(), j.at("user").get<int>()});
  }
  return out;
}

std::string history_to_csv(const TrainHistory& h) {
  std::ostringstream out;
  out << "epoch,loss,loss_primary,loss_aux,train_accuracy\n";
  out.precision(17);
  for (std::size_t e = 0; e < h.epochs.size(); ++e) {
    const EpochStats& s = h.epochs[e];
    out << e << ',' << s.loss << ',' << s.loss_primary << ',' << s.loss_aux << ','
        << s.train_accuracy << '\n';
  }
  return out.str();
}

void write_history(const TrainHistory& h, const std::string& path) {
  write_text(history_to_csv(h), path);
}

std::string eval_report_to_json(const EvalReport& r) {
  json confusion = json::array();
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < r.confusion.cols(); ++c) row.push_back(r.confusion(i, c));
    confusion.push_back(row);
  }
  return json{{"accuracy", r.accuracy},
              {"macro_f1", r.macro_f1},
              {"macro_auc", r.macro_auc},
              {"per_class_f1", r.per_class_f1},
              {"confusion", confusion}}
      .dump(2);
}

std::string roc_to_csv(const std::vector<RocPoint>& points, int user) {
  std::ostringstream out;
  out << (user >= 0 ? "user,threshold,fpr,tpr\n" : "threshold,fpr,tpr\n");
  out.precision(17);
  for (const RocPoint& p : points) {
    if (user >= 0) out << user << ',';
    out << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
  }
  return out.str();
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::parse_error, "write_text: cannot open " + path);
  out << text;
  if (!out) fail(Errc::parse_error, "write_text: write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::parse_error, "read_text: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mmgest
