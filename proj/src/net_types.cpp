#include "mmgest/net_types.hpp"

#include <cmath>

#include "mmgest/rng.hpp"

namespace mmgest {

namespace {

void validate_widths(const std::vector<int>& widths, const char* who) {
  if (widths.empty()) fail(Errc::bad_config, std::string(who) + ": empty MLP widths");
  for (int w : widths)
    if (w < 1) fail(Errc::bad_config, std::string(who) + ": widths must be >= 1");
}

void validate_block(const SABlockSpec& b, const char* who) {
  if (b.centers < 1) fail(Errc::bad_config, std::string(who) + ": centers must be >= 1");
  if (b.scales.empty()) fail(Errc::bad_config, std::string(who) + ": no scales");
  for (const ScaleSpec& s : b.scales) {
    if (!(s.radius > 0.0)) fail(Errc::bad_config, std::string(who) + ": radius must be > 0");
    if (s.group_size < 1) fail(Errc::bad_config, std::string(who) + ": group size must be >= 1");
    validate_widths(s.mlp_widths, who);
  }
}

}  // namespace

void NetConfig::validate() const {
  if (point_count < 1) fail(Errc::bad_config, "net: point_count must be >= 1");
  if (in_channels != 3 && in_channels != 5)
    fail(Errc::bad_config, "net: in_channels must be 3 or 5");
  validate_block(sa1, "net.sa1");
  validate_block(sa2, "net.sa2");
  if (level_dim_l1 < 1 || level_dim_l2 < 1)
    fail(Errc::bad_config, "net: level dims must be >= 1");
  validate_widths(global_mlp_l1, "net.global_mlp_l1");
  validate_widths(global_mlp_l2, "net.global_mlp_l2");
  if (global_mlp_l1.back() != level_dim_l1 || global_mlp_l2.back() != level_dim_l2)
    fail(Errc::bad_config, "net: global MLP output must equal the level dim");
  for (int w : head_fc_l1)
    if (w < 1) fail(Errc::bad_config, "net: head widths must be >= 1");
  for (int w : head_fc_l2)
    if (w < 1) fail(Errc::bad_config, "net: head widths must be >= 1");
  if (num_classes < 2) fail(Errc::bad_config, "net: num_classes must be >= 2");
}

NetConfig NetConfig::defaults(int num_classes) {
  NetConfig cfg;
  cfg.point_count = 256;
  cfg.in_channels = 5;
  cfg.sa1 = {64, {{0.2, 16, {32, 32, 64}}, {0.4, 32, {32, 32, 64}}}};
  cfg.sa2 = {16, {{0.4, 16, {64, 64, 128}}, {0.8, 32, {64, 64, 128}}}};
  cfg.level_dim_l1 = 256;
  cfg.level_dim_l2 = 512;
  cfg.global_mlp_l1 = {256};
  cfg.global_mlp_l2 = {512};
  cfg.head_fc_l1 = {128, 64};
  cfg.head_fc_l2 = {128};
  cfg.num_classes = num_classes;
  return cfg;
}

NetConfig NetConfig::compact(int num_classes) {
  NetConfig cfg;
  cfg.point_count = 160;
  cfg.in_channels = 5;
  cfg.sa1 = {28, {{0.25, 8, {16, 24}}, {0.55, 12, {16, 24}}}};
  cfg.sa2 = {8, {{0.55, 8, {32, 48}}, {1.1, 12, {32, 48}}}};
  cfg.level_dim_l1 = 96;
  cfg.level_dim_l2 = 192;
  cfg.global_mlp_l1 = {96};
  cfg.global_mlp_l2 = {192};
  cfg.head_fc_l1 = {48};
  cfg.head_fc_l2 = {48};
  cfg.num_classes = num_classes;
  return cfg;
}

NetConfig NetConfig::tiny(int num_classes) {
  NetConfig cfg;
  cfg.point_count = 8;
  cfg.in_channels = 5;
  cfg.sa1 = {4, {{0.5, 3, {6}}, {1.0, 4, {5}}}};
  cfg.sa2 = {2, {{1.0, 3, {7}}}};
  cfg.level_dim_l1 = 9;
  cfg.level_dim_l2 = 10;
  cfg.global_mlp_l1 = {9};
  cfg.global_mlp_l2 = {10};
  cfg.head_fc_l1 = {6};
  cfg.head_fc_l2 = {5};
  cfg.num_classes = num_classes;
  return cfg;
}

ModelParams::ModelParams(const NetConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  std::size_t offset = 0;
  const auto add = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    specs_.push_back({name, rows, cols, offset});
    by_name_.emplace(name, specs_.size() - 1);
    offset += specs_.back().count();
  };
  const auto add_mlp = [&](const std::string& prefix, int in_dim,
                           const std::vector<int>& widths) {
    int in = in_dim;
    for (std::size_t l = 0; l < widths.size(); ++l) {
      add(prefix + ".mlp" + std::to_string(l) + ".W", widths[l], in);
      add(prefix + ".mlp" + std::to_string(l) + ".b", widths[l], 1);
      in = widths[l];
    }
  };

  const int extra = cfg_.in_channels - 3;  // non-xyz channels carried into groups
  for (std::size_t s = 0; s < cfg_.sa1.scales.size(); ++s)
    add_mlp("sa1.s" + std::to_string(s), 3 + extra, cfg_.sa1.scales[s].mlp_widths);
  for (std::size_t s = 0; s < cfg_.sa2.scales.size(); ++s)
    add_mlp("sa2.s" + std::to_string(s), 3 + cfg_.sa1.output_width(),
            cfg_.sa2.scales[s].mlp_widths);

  add_mlp("global1", cfg_.sa1.output_width(), cfg_.global_mlp_l1);
  add_mlp("global2", cfg_.sa2.output_width(), cfg_.global_mlp_l2);

  if (cfg_.fuse) {
    add("resize21.W", cfg_.level_dim_l1, cfg_.level_dim_l2);
    add("resize21.b", cfg_.level_dim_l1, 1);
    add("resize12.W", cfg_.level_dim_l2, cfg_.level_dim_l1);
    add("resize12.b", cfg_.level_dim_l2, 1);
    add("gate1.w", 1, cfg_.level_dim_l1);
    add("gate1.b", 1, 1);
    add("gate2.w", 1, cfg_.level_dim_l2);
    add("gate2.b", 1, 1);
  }

  const auto add_head = [&](const std::string& prefix, int in_dim,
                            const std::vector<int>& widths) {
    int in = in_dim;
    for (std::size_t l = 0; l < widths.size(); ++l) {
      add(prefix + ".fc" + std::to_string(l) + ".W", widths[l], in);
      add(prefix + ".fc" + std::to_string(l) + ".b", widths[l], 1);
      in = widths[l];
    }
    add(prefix + ".out.W", cfg_.num_classes, in);
    add(prefix + ".out.b", cfg_.num_classes, 1);
  };
  add_head("head1", cfg_.level_dim_l1, cfg_.head_fc_l1);
  add_head("head2", cfg_.level_dim_l2, cfg_.head_fc_l2);

  data_.setZero(static_cast<Eigen::Index>(offset));
}

std::size_t ModelParams::require(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end())
    fail(Errc::shape_mismatch, "ModelParams: unknown tensor '" + name + "'");
  return it->second;
}

void initialize_params(ModelParams& params, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < params.tensor_count(); ++i) {
    const TensorSpec& spec = params.spec(i);
    auto t = params.tensor(i);
    if (spec.cols == 1 && spec.name.ends_with(".b")) {
      t.setZero();
      continue;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(spec.cols));
    for (Eigen::Index c = 0; c < spec.cols; ++c)
      for (Eigen::Index r = 0; r < spec.rows; ++r) t(r, c) = rng.uniform(-bound, bound);
  }
}

}  // namespace mmgest
