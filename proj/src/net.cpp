#include "mmgest/net.hpp"

#include <cmath>

namespace mmgest {

namespace {

std::vector<std::string> scale_layer_names(int block, std::size_t scale,
                                           std::size_t layers) {
  std::vector<std::string> names;
  const std::string prefix =
      "sa" + std::to_string(block) + ".s" + std::to_string(scale) + ".mlp";
  for (std::size_t l = 0; l < layers; ++l) names.push_back(prefix + std::to_string(l));
  return names;
}

std::vector<std::string> global_layer_names(int level, std::size_t layers) {
  std::vector<std::string> names;
  const std::string prefix = "global" + std::to_string(level) + ".mlp";
  for (std::size_t l = 0; l < layers; ++l) names.push_back(prefix + std::to_string(l));
  return names;
}

std::vector<std::string> head_layer_names(int head, std::size_t hidden) {
  std::vector<std::string> names;
  const std::string prefix = "head" + std::to_string(head);
  for (std::size_t l = 0; l < hidden; ++l)
    names.push_back(prefix + ".fc" + std::to_string(l));
  names.push_back(prefix + ".out");
  return names;
}

// Shared pointwise MLP: affine + ReLU per layer; the last layer's ReLU is
// optional (heads end with a plain affine classifier).
Eigen::MatrixXd mlp_forward(const ModelParams& p, const std::vector<std::string>& layers,
                            const Eigen::MatrixXd& input, bool final_relu,
                            MlpTrace* trace) {
  if (trace) {
    trace->input = input;
    trace->pre.clear();
  }
  Eigen::MatrixXd a = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto W = p.tensor(layers[l] + ".W");
    const auto b = p.tensor(layers[l] + ".b");
    if (W.cols() != a.rows())
      fail(Errc::shape_mismatch, "mlp_forward: input dim mismatch at " + layers[l]);
    Eigen::MatrixXd z = (W * a).colwise() + b.col(0);
    if (trace) trace->pre.push_back(z);
    const bool relu = (l + 1 < layers.size()) || final_relu;
    a = relu ? z.cwiseMax(0.0).eval() : std::move(z);
  }
  return a;
}

// Backward through the same MLP; returns the gradient w.r.t. the input.
Eigen::MatrixXd mlp_backward(const ModelParams& p, ModelParams& g,
                             const std::vector<std::string>& layers, const MlpTrace& tr,
                             bool final_relu, Eigen::MatrixXd d_out) {
  Eigen::MatrixXd da = std::move(d_out);
  for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
    const Eigen::MatrixXd& z = tr.pre[static_cast<std::size_t>(l)];
    Eigen::MatrixXd dz;
    const bool relu = (static_cast<std::size_t>(l) + 1 < layers.size()) || final_relu;
    if (relu)
      dz = da.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    else
      dz = std::move(da);

    const Eigen::MatrixXd a_prev =
        l == 0 ? tr.input : tr.pre[static_cast<std::size_t>(l - 1)].cwiseMax(0.0);
    auto gw = g.tensor(layers[static_cast<std::size_t>(l)] + ".W");
    auto gb = g.tensor(layers[static_cast<std::size_t>(l)] + ".b");
    gw.noalias() += dz * a_prev.transpose();
    gb.col(0).noalias() += dz.rowwise().sum();
    da.noalias() = p.tensor(layers[static_cast<std::size_t>(l)] + ".W").transpose() * dz;
  }
  return da;
}

// Max over each center's group of m columns; first index wins ties.
Eigen::MatrixXd max_pool_groups(const Eigen::MatrixXd& a, int centers, int m,
                                std::vector<int>* argmax) {
  const Eigen::Index width = a.rows();
  Eigen::MatrixXd pooled(width, centers);
  if (argmax) argmax->assign(static_cast<std::size_t>(width) * centers, 0);
  for (int j = 0; j < centers; ++j) {
    const Eigen::Index base = static_cast<Eigen::Index>(j) * m;
    for (Eigen::Index d = 0; d < width; ++d) {
      double best = a(d, base);
      Eigen::Index best_col = base;
      for (int t = 1; t < m; ++t) {
        if (a(d, base + t) > best) {
          best = a(d, base + t);
          best_col = base + t;
        }
      }
      pooled(d, j) = best;
      if (argmax)
        (*argmax)[static_cast<std::size_t>(d + width * j)] = static_cast<int>(best_col);
    }
  }
  return pooled;
}

Eigen::MatrixXd pool_scatter(const Eigen::MatrixXd& d_pooled,
                             const std::vector<int>& argmax, Eigen::Index cols) {
  Eigen::MatrixXd da = Eigen::MatrixXd::Zero(d_pooled.rows(), cols);
  const Eigen::Index width = d_pooled.rows();
  for (Eigen::Index j = 0; j < d_pooled.cols(); ++j)
    for (Eigen::Index d = 0; d < width; ++d)
      da(d, argmax[static_cast<std::size_t>(d + width * j)]) += d_pooled(d, j);
  return da;
}

const SABlockSpec& block_spec(const NetConfig& cfg, int block) {
  if (block == 1) return cfg.sa1;
  if (block == 2) return cfg.sa2;
  fail(Errc::bad_config, "sa block index must be 1 or 2");
}

}  // namespace

Eigen::MatrixXd sa_block_forward(const ModelParams& params, int block,
                                 const PreparedBlock& prep,
                                 const Eigen::MatrixXd* carried_features,
                                 BlockTrace* trace) {
  const SABlockSpec& spec = block_spec(params.config(), block);
  if (prep.scales.size() != spec.scales.size())
    fail(Errc::shape_mismatch, "sa_block_forward: prepared scales mismatch");

  Eigen::MatrixXd f_s(spec.output_width(), spec.centers);
  if (trace) trace->scales.assign(spec.scales.size(), ScaleTrace{});

  Eigen::Index row = 0;
  for (std::size_t s = 0; s < spec.scales.size(); ++s) {
    const ScaleSpec& scale = spec.scales[s];
    const PreparedScale& ps = prep.scales[s];

    Eigen::MatrixXd input = ps.base_input;
    if (carried_features) {
      const Eigen::Index fr = carried_features->rows();
      if (input.rows() != 3 + fr)
        fail(Errc::shape_mismatch, "sa_block_forward: carried feature dim mismatch");
      for (Eigen::Index col = 0; col < input.cols(); ++col)
        input.block(3, col, fr, 1) =
            carried_features->col(ps.members[static_cast<std::size_t>(col)]);
    }

    const auto names = scale_layer_names(block, s, scale.mlp_widths.size());
    const Eigen::MatrixXd a =
        mlp_forward(params, names, input, true, trace ? &trace->scales[s].mlp : nullptr);

    std::vector<int> argmax;
    const Eigen::MatrixXd pooled = max_pool_groups(
        a, spec.centers, scale.group_size, trace ? &argmax : nullptr);
    if (trace) {
      trace->scales[s].argmax = std::move(argmax);
      trace->scales[s].pooled = pooled;
    }
    f_s.middleRows(row, pooled.rows()) = pooled;
    row += pooled.rows();
  }
  if (trace) trace->f_s = f_s;
  return f_s;
}

Eigen::VectorXd global_feature(const ModelParams& params, int level,
                               const Eigen::MatrixXd& f_s, GlobalTrace* trace) {
  if (f_s.cols() < 1) fail(Errc::shape_mismatch, "global_feature: no centers");
  const NetConfig& cfg = params.config();
  const auto& widths = level == 1 ? cfg.global_mlp_l1 : cfg.global_mlp_l2;
  const auto names = global_layer_names(level, widths.size());

  const Eigen::MatrixXd a =
      mlp_forward(params, names, f_s, true, trace ? &trace->mlp : nullptr);

  std::vector<int> argmax;
  const Eigen::MatrixXd pooled =
      max_pool_groups(a, 1, static_cast<int>(a.cols()), trace ? &argmax : nullptr);
  Eigen::VectorXd feature = pooled.col(0);
  if (trace) {
    trace->argmax = std::move(argmax);
    trace->feature = feature;
  }
  return feature;
}

Eigen::VectorXd resize_feature(const Eigen::VectorXd& f, const Eigen::MatrixXd& W,
                               const Eigen::VectorXd& b) {
  if (W.cols() != f.size() || W.rows() != b.size())
    fail(Errc::shape_mismatch, "resize_feature: shape mismatch");
  return ((W * f) + b).cwiseMax(0.0);
}

FuseResult attention_fuse(const Eigen::VectorXd& f_native,
                          const Eigen::VectorXd& f_resized,
                          const Eigen::RowVectorXd& gate_w, double gate_b) {
  if (f_native.size() != f_resized.size() || gate_w.size() != f_native.size())
    fail(Errc::shape_mismatch, "attention_fuse: dimension mismatch");
  const double s_native = (gate_w * f_native)(0) + gate_b;
  const double s_resized = (gate_w * f_resized)(0) + gate_b;
  FuseResult out;
  out.w_resized = 1.0 / (1.0 + std::exp(s_native - s_resized));
  out.w_native = 1.0 - out.w_resized;  // exact complement
  out.fused = out.w_resized * f_resized + out.w_native * f_native;
  return out;
}

namespace {

FuseTrace run_fusion(const ModelParams& params, int level, const Eigen::VectorXd& native,
                     const Eigen::VectorXd& other_level) {
  const std::string resize_name = level == 1 ? "resize21" : "resize12";
  const std::string gate_name = "gate" + std::to_string(level);
  const auto W = params.tensor(resize_name + ".W");
  const auto b = params.tensor(resize_name + ".b");

  FuseTrace t;
  t.active = true;
  t.native = native;
  t.resize_pre = (W * other_level) + b.col(0);
  t.resized = t.resize_pre.cwiseMax(0.0);

  const auto gate_w = params.tensor(gate_name + ".w");
  const double gate_b = params.tensor(gate_name + ".b")(0, 0);
  t.s_native = (gate_w * t.native)(0, 0) + gate_b;
  t.s_resized = (gate_w * t.resized)(0, 0) + gate_b;
  t.w_resized = 1.0 / (1.0 + std::exp(t.s_native - t.s_resized));
  t.w_native = 1.0 - t.w_resized;
  t.fused = t.w_resized * t.resized + t.w_native * t.native;
  return t;
}

// Returns d(native level feature); accumulates gate/resize gradients and the
// gradient flowing into the other level's feature.
Eigen::VectorXd fusion_backward(const ModelParams& params, ModelParams& grads, int level,
                                const FuseTrace& t, const Eigen::VectorXd& other_feature,
                                const Eigen::VectorXd& d_fused,
                                Eigen::VectorXd& d_other) {
  const std::string resize_name = level == 1 ? "resize21" : "resize12";
  const std::string gate_name = "gate" + std::to_string(level);
  const auto gate_w = params.tensor(gate_name + ".w");

  Eigen::VectorXd d_resized = t.w_resized * d_fused;
  Eigen::VectorXd d_native = t.w_native * d_fused;

  const double d_w_resized = d_fused.dot(t.resized);
  const double d_w_native = d_fused.dot(t.native);
  const double ds_resized = t.w_resized * t.w_native * (d_w_resized - d_w_native);
  const double ds_native = -ds_resized;

  auto g_gate_w = grads.tensor(gate_name + ".w");
  g_gate_w.noalias() += ds_resized * t.resized.transpose();
  g_gate_w.noalias() += ds_native * t.native.transpose();
  grads.tensor(gate_name + ".b")(0, 0) += ds_resized + ds_native;

  d_resized.noalias() += ds_resized * gate_w.transpose();
  d_native.noalias() += ds_native * gate_w.transpose();

  // Through the resizing block into the other level's feature.
  const Eigen::VectorXd dz =
      d_resized.cwiseProduct((t.resize_pre.array() > 0.0).cast<double>().matrix());
  auto gw = grads.tensor(resize_name + ".W");
  gw.noalias() += dz * other_feature.transpose();
  grads.tensor(resize_name + ".b").col(0).noalias() += dz;
  d_other.noalias() += params.tensor(resize_name + ".W").transpose() * dz;

  return d_native;
}

}  // namespace

ForwardResult forward(const ModelParams& params, const PreparedInput& prep,
                      ForwardTrace* trace) {
  const NetConfig& cfg = params.config();
  if (prep.x.rows() != cfg.in_channels || prep.x.cols() != cfg.point_count)
    fail(Errc::shape_mismatch, "forward: prepared input shape mismatch");

  const Eigen::MatrixXd f_s1 =
      sa_block_forward(params, 1, prep.sa1, nullptr, trace ? &trace->sa1 : nullptr);
  const Eigen::MatrixXd f_s2 =
      sa_block_forward(params, 2, prep.sa2, &f_s1, trace ? &trace->sa2 : nullptr);

  const Eigen::VectorXd f1 =
      global_feature(params, 1, f_s1, trace ? &trace->lvl1 : nullptr);
  const Eigen::VectorXd f2 =
      global_feature(params, 2, f_s2, trace ? &trace->lvl2 : nullptr);

  Eigen::VectorXd y1, y2;
  if (cfg.fuse) {
    FuseTrace t1 = run_fusion(params, 1, f1, f2);
    FuseTrace t2 = run_fusion(params, 2, f2, f1);
    y1 = t1.fused;
    y2 = t2.fused;
    if (trace) {
      trace->fuse1 = std::move(t1);
      trace->fuse2 = std::move(t2);
    }
  } else {
    y1 = f1;
    y2 = f2;
  }

  ForwardResult out;
  out.logits1 = mlp_forward(params, head_layer_names(1, cfg.head_fc_l1.size()), y1,
                            false, trace ? &trace->head1.mlp : nullptr);
  out.logits2 = mlp_forward(params, head_layer_names(2, cfg.head_fc_l2.size()), y2,
                            false, trace ? &trace->head2.mlp : nullptr);
  if (trace) {
    trace->head1.logits = out.logits1;
    trace->head2.logits = out.logits2;
  }

  if (!out.logits1.allFinite() || !out.logits2.allFinite())
    fail(Errc::non_finite_activation, "forward: non-finite logits");

  if (trace) {
    trace->sa2_members.clear();
    for (const PreparedScale& ps : prep.sa2.scales) trace->sa2_members.push_back(ps.members);
    trace->param_size = params.size();
    trace->num_classes = cfg.num_classes;
  }
  return out;
}

ForwardResult forward(const ModelParams& params, const GestureCloud& cloud,
                      ForwardTrace* trace) {
  const PreparedInput prep = prepare_input(cloud, params.config());
  return forward(params, prep, trace);
}

LossResult total_loss(const Eigen::VectorXd& logits1, const Eigen::VectorXd& logits2,
                      int label) {
  if (logits1.size() != logits2.size())
    fail(Errc::shape_mismatch, "total_loss: head sizes differ");
  if (label < 0 || label >= logits1.size())
    fail(Errc::label_out_of_range, "total_loss: label outside [0, num_classes)");

  const auto cross_entropy = [&](const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) sum += std::exp(logits(i) - m);
    return m + std::log(sum) - logits(label);
  };

  LossResult out;
  out.primary = cross_entropy(logits1);
  out.aux = cross_entropy(logits2);
  out.total = out.primary + out.aux;
  return out;
}

ModelParams backward(const ModelParams& params, const ForwardTrace& trace, int label) {
  ModelParams grads(params.config());
  backward_into(params, trace, label, grads);
  return grads;
}

void backward_into(const ModelParams& params, const ForwardTrace& trace, int label,
                   ModelParams& grads) {
  const NetConfig& cfg = params.config();
  if (trace.param_size != params.size() || trace.num_classes != cfg.num_classes)
    fail(Errc::trace_mismatch, "backward: trace does not match the parameter set");
  if (cfg.fuse != trace.fuse1.active)
    fail(Errc::trace_mismatch, "backward: fusion mode differs from the trace");
  if (label < 0 || label >= cfg.num_classes)
    fail(Errc::label_out_of_range, "backward: label outside [0, num_classes)");
  if (grads.size() != params.size())
    fail(Errc::shape_mismatch, "backward: gradient buffer shape mismatch");
  grads.set_zero();

  // Heads: d logits = softmax - onehot.
  Eigen::VectorXd d_logits1 = softmax(trace.head1.logits);
  d_logits1(label) -= 1.0;
  Eigen::VectorXd d_logits2 = softmax(trace.head2.logits);
  d_logits2(label) -= 1.0;

  Eigen::VectorXd d_y1 =
      mlp_backward(params, grads, head_layer_names(1, cfg.head_fc_l1.size()),
                   trace.head1.mlp, false, d_logits1);
  Eigen::VectorXd d_y2 =
      mlp_backward(params, grads, head_layer_names(2, cfg.head_fc_l2.size()),
                   trace.head2.mlp, false, d_logits2);

  Eigen::VectorXd d_f1, d_f2;
  if (cfg.fuse) {
    d_f1 = Eigen::VectorXd::Zero(cfg.level_dim_l1);
    d_f2 = Eigen::VectorXd::Zero(cfg.level_dim_l2);
    d_f1 += fusion_backward(params, grads, 1, trace.fuse1, trace.lvl2.feature, d_y1, d_f2);
    d_f2 += fusion_backward(params, grads, 2, trace.fuse2, trace.lvl1.feature, d_y2, d_f1);
  } else {
    d_f1 = d_y1;
    d_f2 = d_y2;
  }

  // Global features: scatter over the pooled centers, then the level MLPs.
  const auto global_backward = [&](int level, const GlobalTrace& gt,
                                   const Eigen::VectorXd& d_feature) {
    const auto& widths = level == 1 ? cfg.global_mlp_l1 : cfg.global_mlp_l2;
    const Eigen::MatrixXd d_pooled = d_feature;
    const Eigen::MatrixXd da =
        pool_scatter(d_pooled, gt.argmax, gt.mlp.pre.back().cols());
    return mlp_backward(params, grads, global_layer_names(level, widths.size()), gt.mlp,
                        true, da);
  };
  Eigen::MatrixXd d_fs1 = global_backward(1, trace.lvl1, d_f1);
  Eigen::MatrixXd d_fs2 = global_backward(2, trace.lvl2, d_f2);

  // sa2: per scale, un-pool, run the MLP backward, and scatter the feature
  // rows of the input gradient back onto sa1's per-center features.
  Eigen::Index row = 0;
  for (std::size_t s = 0; s < cfg.sa2.scales.size(); ++s) {
    const ScaleSpec& scale = cfg.sa2.scales[s];
    const ScaleTrace& st = trace.sa2.scales[s];
    const Eigen::Index width = scale.mlp_widths.back();
    const Eigen::MatrixXd d_pooled = d_fs2.middleRows(row, width);
    row += width;
    const Eigen::MatrixXd da =
        pool_scatter(d_pooled, st.argmax, st.mlp.pre.back().cols());
    const Eigen::MatrixXd d_input = mlp_backward(
        params, grads, scale_layer_names(2, s, scale.mlp_widths.size()), st.mlp, true, da);
    const std::vector<int>& members = trace.sa2_members[s];
    const Eigen::Index feat_rows = d_input.rows() - 3;
    for (Eigen::Index col = 0; col < d_input.cols(); ++col)
      d_fs1.col(members[static_cast<std::size_t>(col)]) +=
          d_input.block(3, col, feat_rows, 1);
  }

  // sa1: same unrolling; the input gradient ends at the raw point features.
  row = 0;
  for (std::size_t s = 0; s < cfg.sa1.scales.size(); ++s) {
    const ScaleSpec& scale = cfg.sa1.scales[s];
    const ScaleTrace& st = trace.sa1.scales[s];
    const Eigen::Index width = scale.mlp_widths.back();
    const Eigen::MatrixXd d_pooled = d_fs1.middleRows(row, width);
    row += width;
    const Eigen::MatrixXd da =
        pool_scatter(d_pooled, st.argmax, st.mlp.pre.back().cols());
    mlp_backward(params, grads, scale_layer_names(1, s, scale.mlp_widths.size()), st.mlp,
                 true, da);
  }
}

int predict(const ModelParams& params, const PreparedInput& prep) {
  return argmax_lowest(forward(params, prep).logits1);
}

int predict(const ModelParams& params, const GestureCloud& cloud) {
  return argmax_lowest(forward(params, cloud).logits1);
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace mmgest
