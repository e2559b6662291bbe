#include "mmgest/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmgest {

namespace {

constexpr const char* kHeader = "mmgest-model v1";

nlohmann::json scale_to_json(const ScaleSpec& s) {
  return {{"radius", s.radius}, {"group_size", s.group_size}, {"widths", s.mlp_widths}};
}

ScaleSpec scale_from_json(const nlohmann::json& j) {
  ScaleSpec s;
  s.radius = j.at("radius").get<double>();
  s.group_size = j.at("group_size").get<int>();
  s.mlp_widths = j.at("widths").get<std::vector<int>>();
  return s;
}

nlohmann::json block_to_json(const SABlockSpec& b) {
  nlohmann::json scales = nlohmann::json::array();
  for (const ScaleSpec& s : b.scales) scales.push_back(scale_to_json(s));
  return {{"centers", b.centers}, {"scales", scales}};
}

SABlockSpec block_from_json(const nlohmann::json& j) {
  SABlockSpec b;
  b.centers = j.at("centers").get<int>();
  for (const auto& s : j.at("scales")) b.scales.push_back(scale_from_json(s));
  return b;
}

nlohmann::json config_to_json(const NetConfig& cfg) {
  return {{"point_count", cfg.point_count},
          {"in_channels", cfg.in_channels},
          {"sa1", block_to_json(cfg.sa1)},
          {"sa2", block_to_json(cfg.sa2)},
          {"level_dim_l1", cfg.level_dim_l1},
          {"level_dim_l2", cfg.level_dim_l2},
          {"global_mlp_l1", cfg.global_mlp_l1},
          {"global_mlp_l2", cfg.global_mlp_l2},
          {"head_fc_l1", cfg.head_fc_l1},
          {"head_fc_l2", cfg.head_fc_l2},
          {"num_classes", cfg.num_classes},
          {"fuse", cfg.fuse}};
}

NetConfig config_from_json(const nlohmann::json& j) {
  NetConfig cfg;
  cfg.point_count = j.at("point_count").get<int>();
  cfg.in_channels = j.at("in_channels").get<int>();
  cfg.sa1 = block_from_json(j.at("sa1"));
  cfg.sa2 = block_from_json(j.at("sa2"));
  cfg.level_dim_l1 = j.at("level_dim_l1").get<int>();
  cfg.level_dim_l2 = j.at("level_dim_l2").get<int>();
  cfg.global_mlp_l1 = j.at("global_mlp_l1").get<std::vector<int>>();
  cfg.global_mlp_l2 = j.at("global_mlp_l2").get<std::vector<int>>();
  cfg.head_fc_l1 = j.at("head_fc_l1").get<std::vector<int>>();
  cfg.head_fc_l2 = j.at("head_fc_l2").get<std::vector<int>>();
  cfg.num_classes = j.at("num_classes").get<int>();
  cfg.fuse = j.at("fuse").get<bool>();
  return cfg;
}

}  // namespace

std::string model_to_string(const ModelParams& params) {
  std::string out;
  out += kHeader;
  out += '\n';
  out += "config ";
  out += config_to_json(params.config()).dump();
  out += '\n';

  char buf[40];
  for (std::size_t i = 0; i < params.tensor_count(); ++i) {
    const TensorSpec& spec = params.spec(i);
    out += "tensor " + spec.name + ' ' + std::to_string(spec.rows) + ' ' +
           std::to_string(spec.cols) + '\n';
    const auto t = params.tensor(i);
    for (Eigen::Index r = 0; r < spec.rows; ++r) {
      for (Eigen::Index c = 0; c < spec.cols; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", t(r, c));
        out += buf;
        out += c + 1 < spec.cols ? ' ' : '\n';
      }
    }
  }
  out += "end\n";
  return out;
}

ModelParams model_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(Errc::parse_error, "model: empty input");
  if (line != kHeader)
    fail(Errc::version_mismatch, "model: expected '" + std::string(kHeader) + "'");

  if (!std::getline(in, line) || line.rfind("config ", 0) != 0)
    fail(Errc::parse_error, "model: missing config line");
  NetConfig cfg;
  try {
    cfg = config_from_json(nlohmann::json::parse(line.substr(7)));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse_error, std::string("model: bad config json: ") + e.what());
  }

  ModelParams params(cfg);
  for (std::size_t i = 0; i < params.tensor_count(); ++i) {
    const TensorSpec& spec = params.spec(i);
    if (!std::getline(in, line))
      fail(Errc::parse_error, "model: truncated before tensor " + spec.name);
    std::istringstream head(line);
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    head >> tag >> name >> rows >> cols;
    if (tag != "tensor" || name != spec.name)
      fail(Errc::shape_mismatch, "model: expected tensor " + spec.name + ", got " + name);
    if (rows != spec.rows || cols != spec.cols)
      fail(Errc::shape_mismatch, "model: tensor " + spec.name + " has wrong shape");

    auto t = params.tensor(i);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!std::getline(in, line))
        fail(Errc::parse_error, "model: truncated inside tensor " + spec.name);
      std::istringstream row(line);
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(row >> t(r, c)))
          fail(Errc::parse_error, "model: bad value in tensor " + spec.name);
      }
    }
  }
  if (!std::getline(in, line) || line != "end")
    fail(Errc::parse_error, "model: missing end marker");
  return params;
}

void save_model(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::parse_error, "save_model: cannot open " + path);
  out << model_to_string(params);
  if (!out) fail(Errc::parse_error, "save_model: write failed for " + path);
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::parse_error, "load_model: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_string(buf.str());
}

}  // namespace mmgest
