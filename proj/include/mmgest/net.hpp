#pragma once

#include <Eigen/Core>

#include "mmgest/net_ops.hpp"
#include "mmgest/net_types.hpp"

namespace mmgest {

// Per-stage activations kept for the exact backward pass.

struct MlpTrace {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;  // per-layer pre-activations
};

struct ScaleTrace {
  MlpTrace mlp;
  std::vector<int> argmax;  // [d + width*j] = source column of the group max
  Eigen::MatrixXd pooled;   // width x centers
};

struct BlockTrace {
  std::vector<ScaleTrace> scales;
  Eigen::MatrixXd f_s;  // concatenated scale outputs, output_width x centers
};

struct GlobalTrace {
  MlpTrace mlp;
  std::vector<int> argmax;  // [d] = source center column
  Eigen::VectorXd feature;
};

struct FuseTrace {
  bool active = false;
  Eigen::VectorXd native;
  Eigen::VectorXd resized;      // post-ReLU output of the resizing block
  Eigen::VectorXd resize_pre;   // its pre-activation
  double s_native = 0.0, s_resized = 0.0;
  double w_native = 1.0, w_resized = 0.0;
  Eigen::VectorXd fused;
};

struct HeadTrace {
  MlpTrace mlp;
  Eigen::VectorXd logits;
};

struct ForwardTrace {
  std::vector<std::vector<int>> sa2_members;  // per scale; backward scatter map
  BlockTrace sa1, sa2;
  GlobalTrace lvl1, lvl2;
  FuseTrace fuse1, fuse2;
  HeadTrace head1, head2;
  std::size_t param_size = 0;
  int num_classes = 0;
};

struct ForwardResult {
  Eigen::VectorXd logits1;  // primary (low-level fused) head
  Eigen::VectorXd logits2;  // auxiliary (high-level fused) head
};

struct LossResult {
  double total = 0.0;
  double primary = 0.0;
  double aux = 0.0;
};

struct FuseResult {
  Eigen::VectorXd fused;
  double w_native = 0.0;
  double w_resized = 0.0;
};

// --- building blocks -------------------------------------------------------

// One set-abstraction block: per scale, gather groups, run the shared
// pointwise MLP (affine + ReLU each layer) on center-relative features, and
// max-pool each group; scale outputs are stacked into f_s.
// `carried_features` supplies the per-point feature rows for sa2 (sa1's f_s);
// pass nullptr for sa1, whose features are baked into the prepared block.
Eigen::MatrixXd sa_block_forward(const ModelParams& params, int block,
                                 const PreparedBlock& prep,
                                 const Eigen::MatrixXd* carried_features,
                                 BlockTrace* trace = nullptr);

// Pointwise MLP over every center's f_s column followed by max-pool over
// centers: the level feature F^k.
Eigen::VectorXd global_feature(const ModelParams& params, int level,
                               const Eigen::MatrixXd& f_s, GlobalTrace* trace = nullptr);

// ReLU(W f + b); the resizing block mapping a level feature across levels.
Eigen::VectorXd resize_feature(const Eigen::VectorXd& f, const Eigen::MatrixXd& W,
                               const Eigen::VectorXd& b);

// Two-way softmax attention over a shared scalar gate. The weight pair is
// computed as sigmoid of the score difference and its exact complement, so
// w_native + w_resized == 1 holds exactly.
FuseResult attention_fuse(const Eigen::VectorXd& f_native,
                          const Eigen::VectorXd& f_resized,
                          const Eigen::RowVectorXd& gate_w, double gate_b);

// --- whole-network entry points --------------------------------------------

ForwardResult forward(const ModelParams& params, const PreparedInput& prep,
                      ForwardTrace* trace = nullptr);
// Cloud must be centered and resampled to point_count beforehand.
ForwardResult forward(const ModelParams& params, const GestureCloud& cloud,
                      ForwardTrace* trace = nullptr);

// Cross-entropy at both heads; total = primary + aux.
LossResult total_loss(const Eigen::VectorXd& logits1, const Eigen::VectorXd& logits2,
                      int label);

// Exact gradient of total_loss w.r.t. every parameter.
ModelParams backward(const ModelParams& params, const ForwardTrace& trace, int label);
// Same, writing into a reusable buffer (zeroed first).
void backward_into(const ModelParams& params, const ForwardTrace& trace, int label,
                   ModelParams& grads);

// Argmax of the primary head, ties to the lowest index.
int predict(const ModelParams& params, const GestureCloud& cloud);
int predict(const ModelParams& params, const PreparedInput& prep);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
int argmax_lowest(const Eigen::VectorXd& v);

}  // namespace mmgest
