#include <doctest.h>

#include <set>

#include "mmgest/train.hpp"
#include "oracles.hpp"

using namespace mmgest;

namespace {

// Two linearly separated blobs with distinct doppler signatures.
TrainSet separable_set(int per_class, std::uint64_t seed) {
  Rng rng(seed);
  TrainSet set;
  for (int label = 0; label < 2; ++label) {
    for (int i = 0; i < per_class; ++i) {
      GestureCloud c;
      const double cx = label == 0 ? -0.6 : 0.6;
      const double dop = label == 0 ? -0.8 : 0.8;
      for (int k = 0; k < 40; ++k) {
        Point p;
        p.x = cx + rng.normal(0.0, 0.1);
        p.y = 1.0 + rng.normal(0.0, 0.1);
        p.z = rng.normal(0.0, 0.1);
        p.doppler = dop + rng.normal(0.0, 0.1);
        p.intensity = std::abs(rng.normal(1.0, 0.2));
        c.points.push_back(p);
      }
      set.push_back({std::move(c), label});
    }
  }
  return set;
}

std::vector<int> labels_of(const TrainSet& s) {
  std::vector<int> out;
  for (const auto& x : s) out.push_back(x.label);
  return out;
}

NetConfig tiny_train_net(int classes) {
  NetConfig cfg = NetConfig::tiny(classes);
  cfg.point_count = 32;
  cfg.sa1 = {8, {{0.4, 4, {8, 12}}}};
  cfg.sa2 = {4, {{0.8, 4, {16}}}};
  cfg.level_dim_l1 = 12;
  cfg.level_dim_l2 = 16;
  cfg.global_mlp_l1 = {12};
  cfg.global_mlp_l2 = {16};
  cfg.head_fc_l1 = {8};
  cfg.head_fc_l2 = {8};
  return cfg;
}

}  // namespace

TEST_CASE("stratified_split honors ratio, determinism, and partitioning") {
  TrainSet set = separable_set(10, 1);  // 10 per class
  const auto [train, test] = stratified_split(set, 0.8, 5);
  CHECK(train.size() == 16);
  CHECK(test.size() == 4);
  int c0 = 0;
  for (const auto& s : train) c0 += s.label == 0;
  CHECK(c0 == 8);

  const auto [train2, test2] = stratified_split(set, 0.8, 5);
  CHECK(labels_of(train2) == labels_of(train));

  // Partition: disjoint and exhaustive over indices.
  std::vector<int> all_labels = labels_of(set);
  const auto [ti, vi] = stratified_split_indices(all_labels, 0.8, 5);
  std::set<std::size_t> seen(ti.begin(), ti.end());
  for (std::size_t i : vi) CHECK(seen.insert(i).second);
  CHECK(seen.size() == set.size());

  std::vector<int> tiny_class = {0, 0, 0, 1};
  CHECK_THROWS_AS(stratified_split_indices(tiny_class, 0.8, 1), Error);
  CHECK_THROWS_AS(stratified_split_indices({}, 0.8, 1), Error);
}

TEST_CASE("kfold covers every sample exactly once on the test side") {
  TrainSet set = separable_set(25, 2);
  const auto folds = kfold(set, 5, 9);
  REQUIRE(folds.size() == 5);
  for (const auto& [train, test] : folds) {
    CHECK(test.size() == 10);  // 5 per class
    CHECK(train.size() == 40);
  }

  std::vector<int> labels = labels_of(set);
  const auto idx_folds = kfold_indices(labels, 5, 9);
  std::set<std::size_t> seen;
  for (const auto& [train, test] : idx_folds)
    for (std::size_t i : test) CHECK(seen.insert(i).second);
  CHECK(seen.size() == set.size());

  std::vector<int> small = {0, 0, 0, 1, 1, 1};
  CHECK_THROWS_AS(kfold_indices(small, 5, 1), Error);
}

TEST_CASE("train fits a separable problem quickly") {
  TrainSet set = separable_set(12, 3);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.batch = 8;
  cfg.seed = 4;
  cfg.lr = 2e-3;
  cfg.augment.copies = 1;
  const NetConfig net = tiny_train_net(2);

  const TrainResult result = train(set, cfg, net);
  REQUIRE(result.history.epochs.size() == 20);
  CHECK(result.history.epochs.back().train_accuracy == doctest::Approx(1.0));
  for (const EpochStats& e : result.history.epochs) {
    CHECK(std::isfinite(e.loss));
    CHECK(e.loss >= 0.0);
  }
  CHECK(evaluate_accuracy(result.params, set, 99) == doctest::Approx(1.0));
}

TEST_CASE("train is reproducible and zero-lr is a no-op") {
  TrainSet set = separable_set(6, 5);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch = 4;
  cfg.seed = 11;
  const NetConfig net = tiny_train_net(2);

  const TrainResult a = train(set, cfg, net);
  const TrainResult b = train(set, cfg, net);
  REQUIRE(a.params.size() == b.params.size());
  for (std::size_t i = 0; i < a.params.size(); ++i)
    CHECK(a.params.data()[i] == b.params.data()[i]);
  for (std::size_t e = 0; e < a.history.epochs.size(); ++e)
    CHECK(a.history.epochs[e].loss == b.history.epochs[e].loss);

  // Thread count must not change the bytes.
  TrainConfig threaded = cfg;
  threaded.threads = 2;
  TrainConfig serial = cfg;
  serial.threads = 1;
  const TrainResult t2 = train(set, threaded, net);
  const TrainResult t1 = train(set, serial, net);
  for (std::size_t i = 0; i < t1.params.size(); ++i)
    CHECK(t1.params.data()[i] == t2.params.data()[i]);

  TrainConfig frozen = cfg;
  frozen.lr = 0.0;
  const TrainResult f = train(set, frozen, net);
  ModelParams init(net);
  initialize_params(init, frozen.seed);
  for (std::size_t i = 0; i < f.params.size(); ++i)
    CHECK(f.params.data()[i] == init.data()[i]);
  // Constant up to the per-epoch summation order of identical element losses.
  for (std::size_t e = 1; e < f.history.epochs.size(); ++e)
    CHECK(f.history.epochs[e].loss ==
          doctest::Approx(f.history.epochs[0].loss).epsilon(1e-12));
}

TEST_CASE("train validates inputs") {
  const NetConfig net = tiny_train_net(2);
  TrainConfig cfg;
  CHECK_THROWS_AS(train({}, cfg, net), Error);

  TrainSet one_class = separable_set(4, 6);
  one_class.resize(4);  // only label 0
  CHECK_THROWS_AS(train(one_class, cfg, net), Error);

  TrainSet bad_label = separable_set(4, 7);
  bad_label[0].label = 7;
  CHECK_THROWS_AS(train(bad_label, cfg, net), Error);
}

TEST_CASE("plain SGD optimizer also trains") {
  TrainSet set = separable_set(10, 8);
  TrainConfig cfg;
  cfg.optimizer = Optimizer::PlainSgd;
  cfg.lr = 0.05;
  cfg.epochs = 25;
  cfg.seed = 2;
  cfg.augment.copies = 0;
  const TrainResult result = train(set, cfg, tiny_train_net(2));
  CHECK(result.history.epochs.back().train_accuracy >= 0.9);
}

TEST_CASE("augmented copies stay inside train(): test accuracy comes from raw clouds") {
  TrainSet set = separable_set(10, 9);
  const auto [train_set, test_set] = stratified_split(set, 0.8, 3);
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.seed = 5;
  const TrainResult result = train(train_set, cfg, tiny_train_net(2), &test_set);
  CHECK(result.history.final_test_accuracy >= 0.75);
  CHECK(result.history.final_test_accuracy <= 1.0);
}
