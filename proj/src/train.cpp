#include "mmgest/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "mmgest/cloud_ops.hpp"
#include "mmgest/rng.hpp"

namespace mmgest {

namespace {

constexpr std::uint64_t kAugmentSalt = 0xa16;
constexpr std::uint64_t kResampleSalt = 0x5e5a;
constexpr std::uint64_t kEpochSalt = 0xe90c;
constexpr std::uint64_t kEvalSalt = 0xe7a1;

std::map<int, std::vector<std::size_t>> by_class(const std::vector<int>& labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0) && lr != 0.0) fail(Errc::bad_config, "train: lr must be >= 0");
  if (lr < 0.0) fail(Errc::bad_config, "train: lr must be >= 0");
  if (epochs < 0) fail(Errc::bad_config, "train: epochs must be >= 0");
  if (batch < 1) fail(Errc::bad_config, "train: batch must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0))
    fail(Errc::bad_config, "train: split_ratio must be in (0, 1)");
  if (folds < 2) fail(Errc::bad_config, "train: folds must be >= 2");
  if (threads < 1) fail(Errc::bad_config, "train: threads must be >= 1");
  augment.validate();
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    const std::vector<int>& labels, double ratio, std::uint64_t seed) {
  if (labels.empty()) fail(Errc::empty_dataset, "stratified_split: empty dataset");
  if (!(ratio > 0.0 && ratio < 1.0))
    fail(Errc::bad_config, "stratified_split: ratio must be in (0, 1)");

  std::vector<std::size_t> train, test;
  Rng rng(mix_seed(seed, 0x59117ull));
  for (auto& [label, idx] : by_class(labels)) {
    if (idx.size() < 2)
      fail(Errc::class_too_small, "stratified_split: class " + std::to_string(label) +
                                      " has fewer than 2 samples");
    rng.shuffle(idx);
    const std::size_t n_train = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(idx.size())));  // rounding favors train
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < n_train ? train : test).push_back(idx[i]);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

std::pair<TrainSet, TrainSet> stratified_split(const TrainSet& dataset, double ratio,
                                               std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const TrainSample& s : dataset) labels.push_back(s.label);
  const auto [train_idx, test_idx] = stratified_split_indices(labels, ratio, seed);
  TrainSet train, test;
  for (std::size_t i : train_idx) train.push_back(dataset[i]);
  for (std::size_t i : test_idx) test.push_back(dataset[i]);
  return {train, test};
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    const std::vector<int>& labels, int folds, std::uint64_t seed) {
  if (labels.empty()) fail(Errc::empty_dataset, "kfold: empty dataset");
  if (folds < 2) fail(Errc::bad_config, "kfold: folds must be >= 2");

  std::vector<std::vector<std::size_t>> fold_members(static_cast<std::size_t>(folds));
  Rng rng(mix_seed(seed, 0xf01d5ull));
  for (auto& [label, idx] : by_class(labels)) {
    if (static_cast<int>(idx.size()) < folds)
      fail(Errc::class_too_small, "kfold: class " + std::to_string(label) +
                                      " has fewer samples than folds");
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i)
      fold_members[i % static_cast<std::size_t>(folds)].push_back(idx[i]);
  }

  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test = fold_members[static_cast<std::size_t>(f)];
    for (int g = 0; g < folds; ++g)
      if (g != f)
        train.insert(train.end(), fold_members[static_cast<std::size_t>(g)].begin(),
                     fold_members[static_cast<std::size_t>(g)].end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    out.emplace_back(std::move(train), std::move(test));
  }
  return out;
}

std::vector<std::pair<TrainSet, TrainSet>> kfold(const TrainSet& dataset, int folds,
                                                 std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const TrainSample& s : dataset) labels.push_back(s.label);
  std::vector<std::pair<TrainSet, TrainSet>> out;
  for (const auto& [train_idx, test_idx] : kfold_indices(labels, folds, seed)) {
    TrainSet train, test;
    for (std::size_t i : train_idx) train.push_back(dataset[i]);
    for (std::size_t i : test_idx) test.push_back(dataset[i]);
    out.emplace_back(std::move(train), std::move(test));
  }
  return out;
}

namespace {

struct PreppedSample {
  GestureCloud cloud;  // centered, resampled to point_count
  int label = 0;
};

PreppedSample condition(const GestureCloud& cloud, int label, int point_count,
                        std::uint64_t seed) {
  GestureCloud c = normalize_center(cloud);
  c = resample_fixed(c, point_count, seed);
  return {std::move(c), label};
}

// Per-batch element evaluation, parallel over a fixed partition with
// per-element gradient buffers reduced in element order, so the result does
// not depend on the thread count.
struct BatchWork {
  const ModelParams* params = nullptr;
  const std::vector<PreppedSample>* pool = nullptr;
  const std::vector<std::size_t>* order = nullptr;
  std::size_t begin = 0, end = 0;
  std::vector<ModelParams>* grad_buffers = nullptr;
  std::vector<LossResult>* losses = nullptr;
  std::vector<char>* correct = nullptr;
};

void run_batch_range(const BatchWork& w, std::size_t lo, std::size_t hi) {
  ForwardTrace trace;
  for (std::size_t k = lo; k < hi; ++k) {
    const PreppedSample& sample = (*w.pool)[(*w.order)[w.begin + k]];
    const PreparedInput prep = prepare_input(sample.cloud, w.params->config());
    const ForwardResult fwd = forward(*w.params, prep, &trace);
    (*w.losses)[k] = total_loss(fwd.logits1, fwd.logits2, sample.label);
    (*w.correct)[k] = argmax_lowest(fwd.logits1) == sample.label;
    backward_into(*w.params, trace, sample.label, (*w.grad_buffers)[k]);
  }
}

}  // namespace

TrainResult train(const TrainSet& train_set, const TrainConfig& cfg,
                  const NetConfig& net_cfg, const TrainSet* test_set) {
  cfg.validate();
  net_cfg.validate();
  if (train_set.empty()) fail(Errc::empty_dataset, "train: empty training set");
  {
    std::vector<int> distinct;
    for (const TrainSample& s : train_set) {
      if (s.label < 0 || s.label >= net_cfg.num_classes)
        fail(Errc::label_out_of_range, "train: label outside [0, num_classes)");
      if (std::find(distinct.begin(), distinct.end(), s.label) == distinct.end())
        distinct.push_back(s.label);
    }
    if (distinct.size() < 2) fail(Errc::empty_dataset, "train: need >= 2 classes");
  }

  // Augment (training data only), then condition every pooled cloud.
  std::vector<PreppedSample> pool;
  pool.reserve(train_set.size() * (1 + static_cast<std::size_t>(cfg.augment.copies)));
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    const TrainSample& s = train_set[i];
    pool.push_back(condition(s.cloud, s.label, net_cfg.point_count,
                             mix_seed(cfg.seed, mix_seed(kResampleSalt, pool.size()))));
    for (GestureCloud& aug : jitter_augment(
             s.cloud, cfg.augment, mix_seed(cfg.seed, mix_seed(kAugmentSalt, i)))) {
      pool.push_back(condition(aug, s.label, net_cfg.point_count,
                               mix_seed(cfg.seed, mix_seed(kResampleSalt, pool.size()))));
    }
  }

  TrainResult result{ModelParams(net_cfg), {}};
  initialize_params(result.params, cfg.seed);

  const std::size_t flat = result.params.size();
  std::vector<double> adam_m(flat, 0.0), adam_v(flat, 0.0);
  long step = 0;

  const std::size_t batch_cap = static_cast<std::size_t>(cfg.batch);
  std::vector<ModelParams> grad_buffers(batch_cap, ModelParams(net_cfg));
  std::vector<LossResult> losses(batch_cap);
  std::vector<char> correct(batch_cap);
  std::vector<double> grad_sum(flat);

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(cfg.seed, mix_seed(kEpochSalt, epoch)));
    shuffle_rng.shuffle(order);

    EpochStats stats;
    std::size_t seen = 0, n_correct = 0;

    for (std::size_t begin = 0; begin < pool.size(); begin += batch_cap) {
      const std::size_t count = std::min(batch_cap, pool.size() - begin);
      BatchWork work{&result.params, &pool, &order, begin, begin + count,
                     &grad_buffers, &losses, &correct};

      const int threads = std::min<int>(cfg.threads, static_cast<int>(count));
      if (threads <= 1) {
        run_batch_range(work, 0, count);
      } else {
        std::vector<std::thread> crew;
        for (int t = 0; t < threads; ++t) {
          const std::size_t lo = count * static_cast<std::size_t>(t) / threads;
          const std::size_t hi = count * static_cast<std::size_t>(t + 1) / threads;
          crew.emplace_back(run_batch_range, work, lo, hi);
        }
        for (std::thread& th : crew) th.join();
      }

      // Fixed element-order reduction keeps results thread-count independent.
      std::fill(grad_sum.begin(), grad_sum.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        const double* g = grad_buffers[k].data();
        for (std::size_t j = 0; j < flat; ++j) grad_sum[j] += g[j];
        batch_loss += losses[k].total;
        stats.loss += losses[k].total;
        stats.loss_primary += losses[k].primary;
        stats.loss_aux += losses[k].aux;
        n_correct += correct[k] != 0;
      }
      seen += count;
      if (!std::isfinite(batch_loss))
        fail(Errc::divergence_detected, "train: non-finite loss at step " +
                                            std::to_string(step));

      const double inv = 1.0 / static_cast<double>(count);
      double* theta = result.params.data();
      ++step;
      if (cfg.optimizer == Optimizer::AdaptiveMoment) {
        const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step));
        for (std::size_t j = 0; j < flat; ++j) {
          const double g = grad_sum[j] * inv;
          adam_m[j] = b1 * adam_m[j] + (1.0 - b1) * g;
          adam_v[j] = b2 * adam_v[j] + (1.0 - b2) * g * g;
          theta[j] -= cfg.lr * (adam_m[j] / bc1) / (std::sqrt(adam_v[j] / bc2) + eps);
        }
      } else {
        for (std::size_t j = 0; j < flat; ++j) theta[j] -= cfg.lr * grad_sum[j] * inv;
      }
    }

    stats.loss /= static_cast<double>(seen);
    stats.loss_primary /= static_cast<double>(seen);
    stats.loss_aux /= static_cast<double>(seen);
    stats.train_accuracy = static_cast<double>(n_correct) / static_cast<double>(seen);
    result.history.epochs.push_back(stats);
  }

  if (test_set)
    result.history.final_test_accuracy =
        evaluate_accuracy(result.params, *test_set, mix_seed(cfg.seed, kEvalSalt));
  return result;
}

double evaluate_accuracy(const ModelParams& params, const TrainSet& set,
                         std::uint64_t seed) {
  if (set.empty()) fail(Errc::empty_dataset, "evaluate_accuracy: empty set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const PreppedSample s = condition(set[i].cloud, set[i].label,
                                      params.config().point_count, mix_seed(seed, i));
    hits += predict(params, s.cloud) == s.label;
  }
  return static_cast<double>(hits) / static_cast<double>(set.size());
}

GradCheckReport compare_gradients(const ModelParams& params, const PreparedInput& prep,
                                  int label, const ModelParams& analytic,
                                  std::uint64_t seed) {
  if (analytic.size() != params.size())
    fail(Errc::shape_mismatch, "compare_gradients: gradient shape mismatch");

  ModelParams probe = params;  // mutable copy for finite differences
  const auto loss_at = [&]() {
    const ForwardResult fwd = forward(probe, prep);
    return total_loss(fwd.logits1, fwd.logits2, label).total;
  };

  Rng rng(mix_seed(seed, 0xfd11ull));
  GradCheckReport report;
  report.max_rel_err = 0.0;

  for (std::size_t ti = 0; ti < params.tensor_count(); ++ti) {
    const TensorSpec& spec = params.spec(ti);
    const bool is_gate = spec.name.rfind("gate", 0) == 0;
    std::vector<std::size_t> indices;
    if (is_gate || spec.count() <= 8) {
      for (std::size_t j = 0; j < spec.count(); ++j) indices.push_back(j);
    } else {
      for (int k = 0; k < 8; ++k)
        indices.push_back(static_cast<std::size_t>(rng.uniform_index(spec.count())));
    }

    GradCheckBlock block{spec.name, 0.0};
    for (std::size_t j : indices) {
      const std::size_t flat = spec.offset + j;
      const double saved = probe.data()[flat];
      const double h = 1e-4 * std::max(1.0, std::abs(saved));
      probe.data()[flat] = saved + h;
      const double up = loss_at();
      probe.data()[flat] = saved - h;
      const double down = loss_at();
      probe.data()[flat] = saved;

      const double fd = (up - down) / (2.0 * h);
      const double g = analytic.data()[flat];
      // The 1e-6 floor keeps pure finite-difference rounding noise (about
      // eps*|L|/h ~ 1e-12) from registering as relative error on gradients
      // that are exactly zero, e.g. the shift-invariant gate biases.
      const double err = std::abs(fd - g) / std::max(std::abs(fd) + std::abs(g), 1e-6);
      block.max_rel_err = std::max(block.max_rel_err, err);
    }
    report.max_rel_err = std::max(report.max_rel_err, block.max_rel_err);
    report.blocks.push_back(std::move(block));
  }
  report.pass = report.max_rel_err < 1e-4;
  return report;
}

GradCheckReport gradient_check(const NetConfig& net_cfg, std::uint64_t seed) {
  net_cfg.validate();
  ModelParams params(net_cfg);
  initialize_params(params, seed);
  // Move biases off zero so no ReLU sits exactly on its kink.
  Rng bias_rng(mix_seed(seed, 0xb1a5ull));
  for (std::size_t ti = 0; ti < params.tensor_count(); ++ti) {
    if (!params.spec(ti).name.ends_with(".b")) continue;
    auto t = params.tensor(ti);
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) += bias_rng.uniform(-0.1, 0.1);
  }

  Rng rng(mix_seed(seed, 0xda7aull));
  GestureCloud cloud;
  for (int i = 0; i < net_cfg.point_count; ++i) {
    Point p;
    p.x = rng.uniform(-0.5, 0.5);
    p.y = rng.uniform(-0.5, 0.5);
    p.z = rng.uniform(-0.5, 0.5);
    p.doppler = rng.uniform(-1.0, 1.0);
    p.intensity = rng.uniform(0.2, 1.5);
    cloud.points.push_back(p);
  }
  const int label = static_cast<int>(rng.uniform_index(net_cfg.num_classes));

  const PreparedInput prep = prepare_input(cloud, net_cfg);
  ForwardTrace trace;
  forward(params, prep, &trace);
  const ModelParams analytic = backward(params, trace, label);
  return compare_gradients(params, prep, label, analytic, seed);
}

}  // namespace mmgest
