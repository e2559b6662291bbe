#include <doctest.h>

#include "mmgest/train.hpp"
#include "oracles.hpp"

using namespace mmgest;

TEST_CASE("gradient_check passes on the tiny config") {
  const NetConfig cfg = NetConfig::tiny(2);
  const GradCheckReport report = gradient_check(cfg, 7);
  INFO("max relative error ", report.max_rel_err);
  CHECK(report.pass);
  CHECK(report.max_rel_err < 1e-4);
  CHECK(report.blocks.size() == ModelParams(cfg).tensor_count());
}

TEST_CASE("gradient_check covers the fusion-ablated network too") {
  NetConfig cfg = NetConfig::tiny(3);
  cfg.fuse = false;
  const GradCheckReport report = gradient_check(cfg, 11);
  CHECK(report.pass);
}

TEST_CASE("corrupted gate gradients fail the comparison (negative control)") {
  const NetConfig cfg = NetConfig::tiny(2);
  ModelParams params(cfg);
  initialize_params(params, 21);

  Rng rng(22);
  GestureCloud cloud = oracle::random_cloud(rng, cfg.point_count, cfg.point_count, 0.5);
  const PreparedInput prep = prepare_input(cloud, cfg);
  ForwardTrace trace;
  forward(params, prep, &trace);
  ModelParams grads = backward(params, trace, 1);

  auto gate = grads.tensor("gate1.w");
  gate.array() += 0.37;  // deliberate corruption
  const GradCheckReport report = compare_gradients(params, prep, 1, grads, 5);
  CHECK(!report.pass);
}

TEST_CASE("doubling the loss doubles every gradient component") {
  const NetConfig cfg = NetConfig::tiny(2);
  ModelParams params(cfg);
  initialize_params(params, 31);
  // Push biases off the ReLU kinks so the finite differences stay two-sided.
  Rng bias_rng(30);
  for (std::size_t ti = 0; ti < params.tensor_count(); ++ti) {
    if (!params.spec(ti).name.ends_with(".b")) continue;
    auto t = params.tensor(ti);
    for (Eigen::Index r = 0; r < t.rows(); ++r) t(r, 0) += bias_rng.uniform(-0.1, 0.1);
  }
  Rng rng(32);
  GestureCloud cloud = oracle::random_cloud(rng, cfg.point_count, cfg.point_count, 0.5);
  const PreparedInput prep = prepare_input(cloud, cfg);
  ForwardTrace trace;
  forward(params, prep, &trace);
  const ModelParams g = backward(params, trace, 0);

  // Finite differences of 2*(L1+L2) against twice the analytic gradient.
  ModelParams probe = params;
  const auto doubled_loss = [&]() {
    const ForwardResult f = forward(probe, prep);
    return 2.0 * total_loss(f.logits1, f.logits2, 0).total;
  };
  const auto central = [&](std::size_t i, double h) {
    const double saved = probe.data()[i];
    probe.data()[i] = saved + h;
    const double up = doubled_loss();
    probe.data()[i] = saved - h;
    const double down = doubled_loss();
    probe.data()[i] = saved;
    return (up - down) / (2.0 * h);
  };
  int smooth = 0;
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const std::size_t i = rng.uniform_index(params.size());
    const double h = 1e-5 * std::max(1.0, std::abs(probe.data()[i]));
    const double fd = central(i, h);
    // A pool-argmax or ReLU switch inside the stencil invalidates central
    // differences; such points show up as h-dependent estimates.
    if (std::abs(fd - central(i, 0.5 * h)) > 1e-6 * (std::abs(fd) + 1.0)) continue;
    ++smooth;
    const double want = 2.0 * g.data()[i];
    CHECK(std::abs(fd - want) <= 1e-4 * (std::abs(fd) + std::abs(want) + 1e-6));
  }
  CHECK(smooth >= 15);
}

TEST_CASE("gradients vanish on dead max-pool paths") {
  // With strongly separated duplicate-heavy groups, some MLP columns never
  // win the pool; their only gradient path is through shared weights, so a
  // weight used by NO winning column keeps a zero slot. Check the gate bias:
  // the two-way softmax is shift invariant, so its gradient is exactly zero.
  const NetConfig cfg = NetConfig::tiny(2);
  ModelParams params(cfg);
  initialize_params(params, 41);
  Rng rng(42);
  GestureCloud cloud = oracle::random_cloud(rng, cfg.point_count, cfg.point_count, 0.5);
  ForwardTrace trace;
  forward(params, cloud, &trace);
  const ModelParams g = backward(params, trace, 1);
  CHECK(g.tensor("gate1.b")(0, 0) == 0.0);
  CHECK(g.tensor("gate2.b")(0, 0) == 0.0);
}

TEST_CASE("gradient_check reports are deterministic per seed") {
  const NetConfig cfg = NetConfig::tiny(2);
  const GradCheckReport a = gradient_check(cfg, 3);
  const GradCheckReport b = gradient_check(cfg, 3);
  REQUIRE(a.blocks.size() == b.blocks.size());
  CHECK(a.max_rel_err == b.max_rel_err);
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    CHECK(a.blocks[i].name == b.blocks[i].name);
    CHECK(a.blocks[i].max_rel_err == b.blocks[i].max_rel_err);
  }
}

TEST_CASE("backward validates trace consistency") {
  const NetConfig cfg = NetConfig::tiny(2);
  ModelParams params(cfg);
  initialize_params(params, 51);
  Rng rng(52);
  GestureCloud cloud = oracle::random_cloud(rng, cfg.point_count, cfg.point_count, 0.5);
  ForwardTrace trace;
  forward(params, cloud, &trace);

  CHECK_THROWS_AS(backward(params, trace, 9), Error);  // label out of range

  const NetConfig other_cfg = NetConfig::tiny(3);
  ModelParams other(other_cfg);
  initialize_params(other, 51);
  CHECK_THROWS_AS(backward(other, trace, 1), Error);  // mismatched trace
}

TEST_CASE("serialization round trip reproduces logits bit-exactly") {
  // Exercised through model_io in test_io.cpp; here check the in-memory copy.
  const NetConfig cfg = NetConfig::tiny(2);
  ModelParams params(cfg);
  initialize_params(params, 61);
  ModelParams copy = params;
  Rng rng(62);
  GestureCloud cloud = oracle::random_cloud(rng, cfg.point_count, cfg.point_count, 0.5);
  const ForwardResult a = forward(params, cloud);
  const ForwardResult b = forward(copy, cloud);
  CHECK((a.logits1 - b.logits1).lpNorm<Eigen::Infinity>() == 0.0);
}
