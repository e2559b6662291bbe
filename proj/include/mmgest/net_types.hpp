#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmgest/error.hpp"

namespace mmgest {

// One grouping scale of a set-abstraction block: neighbors within `radius`
// (up to `group_size` of them) run through a shared pointwise MLP and are
// max-pooled per center.
struct ScaleSpec {
  double radius = 0.2;            // meters
  int group_size = 16;            // m
  std::vector<int> mlp_widths;    // per-layer output widths
};

struct SABlockSpec {
  int centers = 64;               // n_i
  std::vector<ScaleSpec> scales;

  int output_width() const {
    int w = 0;
    for (const ScaleSpec& s : scales) w += s.mlp_widths.back();
    return w;
  }
};

struct NetConfig {
  int point_count = 256;   // P, points per input cloud
  int in_channels = 5;     // 5 = xyz + doppler + intensity, 3 = xyz only
  SABlockSpec sa1;
  SABlockSpec sa2;
  int level_dim_l1 = 256;
  int level_dim_l2 = 512;
  std::vector<int> global_mlp_l1 = {256};
  std::vector<int> global_mlp_l2 = {512};
  std::vector<int> head_fc_l1 = {128, 64};
  std::vector<int> head_fc_l2 = {128};
  int num_classes = 2;
  bool fuse = true;        // attention fusion between levels (off = single-level heads)

  void validate() const;

  // Stock two-level architecture.
  static NetConfig defaults(int num_classes);
  // Small architecture for fast experiments on modest CPUs.
  static NetConfig compact(int num_classes);
  // Minimal shapes for gradient checking.
  static NetConfig tiny(int num_classes);
};

struct TensorSpec {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::size_t offset = 0;

  std::size_t count() const { return static_cast<std::size_t>(rows * cols); }
};

// All learnable tensors in one flat buffer with a fixed, named layout derived
// from the config. The same container carries gradients and optimizer state.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(const NetConfig& cfg);

  const NetConfig& config() const { return cfg_; }

  std::size_t tensor_count() const { return specs_.size(); }
  const TensorSpec& spec(std::size_t i) const { return specs_[i]; }

  Eigen::Map<Eigen::MatrixXd> tensor(std::size_t i) {
    const TensorSpec& s = specs_[i];
    return {data_.data() + s.offset, s.rows, s.cols};
  }
  Eigen::Map<const Eigen::MatrixXd> tensor(std::size_t i) const {
    const TensorSpec& s = specs_[i];
    return {data_.data() + s.offset, s.rows, s.cols};
  }

  // Throws shape_mismatch for unknown names.
  Eigen::Map<Eigen::MatrixXd> tensor(const std::string& name) {
    return tensor(require(name));
  }
  Eigen::Map<const Eigen::MatrixXd> tensor(const std::string& name) const {
    return tensor(require(name));
  }
  bool has_tensor(const std::string& name) const { return by_name_.count(name) != 0; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return static_cast<std::size_t>(data_.size()); }
  void set_zero() { data_.setZero(); }

  bool all_finite() const { return data_.allFinite(); }

 private:
  std::size_t require(const std::string& name) const;

  NetConfig cfg_;
  std::vector<TensorSpec> specs_;
  std::unordered_map<std::string, std::size_t> by_name_;
  // Eigen-aligned storage keeps every mapped tensor's SIMD peeling, and with
  // it the low-order bits of accumulations, independent of heap layout.
  Eigen::VectorXd data_;
};

// Fan-in scaled uniform weights (+-sqrt(6/fan_in)), zero biases; the RNG is
// consumed in declaration order so initialization is reproducible.
void initialize_params(ModelParams& params, std::uint64_t seed);

}  // namespace mmgest
