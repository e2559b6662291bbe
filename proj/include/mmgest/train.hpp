#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mmgest/augment.hpp"
#include "mmgest/net.hpp"
#include "mmgest/types.hpp"

namespace mmgest {

enum class Optimizer { AdaptiveMoment, PlainSgd };

struct TrainConfig {
  double lr = 1e-3;
  int epochs = 60;
  int batch = 16;
  std::uint64_t seed = 0;
  double split_ratio = 0.8;
  int folds = 5;
  Optimizer optimizer = Optimizer::AdaptiveMoment;
  AugmentConfig augment;  // applied inside train(), training data only
  int threads = 2;        // batch elements evaluated in parallel

  void validate() const;
};

struct EpochStats {
  double loss = 0.0;
  double loss_primary = 0.0;
  double loss_aux = 0.0;
  double train_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  double final_test_accuracy = -1.0;  // -1 when no test set was supplied
};

struct TrainSample {
  GestureCloud cloud;
  int label = 0;
};
using TrainSet = std::vector<TrainSample>;

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

// Per-class shuffled split, the rounding benefit going to the train side.
// Deterministic per seed; classes need >= 2 samples.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    const std::vector<int>& labels, double ratio, std::uint64_t seed);
std::pair<TrainSet, TrainSet> stratified_split(const TrainSet& dataset, double ratio,
                                               std::uint64_t seed);

// Stratified k folds; every sample lands in exactly one test fold.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    const std::vector<int>& labels, int folds, std::uint64_t seed);
std::vector<std::pair<TrainSet, TrainSet>> kfold(const TrainSet& dataset, int folds,
                                                 std::uint64_t seed);

// Deterministic minibatch training: jitter augmentation, then per-sample
// centering and fixed-size resampling, fan-in initialization, a fixed
// shuffling schedule, and the configured optimizer. Identical (seed, data,
// config) reproduce the parameters bit for bit. A non-finite loss aborts
// with divergence_detected.
TrainResult train(const TrainSet& train_set, const TrainConfig& cfg,
                  const NetConfig& net_cfg, const TrainSet* test_set = nullptr);

// Accuracy of `params` on a set, using the same input conditioning as train().
double evaluate_accuracy(const ModelParams& params, const TrainSet& set,
                         std::uint64_t seed);

struct GradCheckBlock {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckBlock> blocks;
  double max_rel_err = 0.0;
  bool pass = false;  // max_rel_err < 1e-4
};

// Central finite differences against the provided analytic gradients on a
// sample of indices per tensor plus every gate parameter.
GradCheckReport compare_gradients(const ModelParams& params, const PreparedInput& prep,
                                  int label, const ModelParams& analytic,
                                  std::uint64_t seed);

// Random params + input on the given config; analytic backward vs central
// finite differences.
GradCheckReport gradient_check(const NetConfig& net_cfg, std::uint64_t seed);

}  // namespace mmgest
