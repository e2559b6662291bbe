#include <doctest.h>

#include "mmgest/eval.hpp"
#include "oracles.hpp"

using namespace mmgest;

namespace {

Eigen::MatrixXd one_hot_scores(const std::vector<int>& labels, int classes) {
  Eigen::MatrixXd scores =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i)
    scores(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  return scores;
}

}  // namespace

TEST_CASE("classification_metrics on perfect predictions") {
  const std::vector<int> truth = {0, 1, 2, 0, 1, 2};
  const EvalReport r = classification_metrics(truth, truth, one_hot_scores(truth, 3));
  CHECK(r.accuracy == doctest::Approx(1.0));
  CHECK(r.macro_f1 == doctest::Approx(1.0));
  CHECK(r.macro_auc == doctest::Approx(1.0));
  CHECK(r.confusion.diagonal().sum() == 6);
}

TEST_CASE("classification_metrics hand-built confusion arithmetic") {
  // Confusion [[2,1,0],[0,3,0],[1,0,3]]: accuracy 8/10.
  std::vector<int> truth, pred;
  const int conf[3][3] = {{2, 1, 0}, {0, 3, 0}, {1, 0, 3}};
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p)
      for (int k = 0; k < conf[t][p]; ++k) {
        truth.push_back(t);
        pred.push_back(p);
      }
  const EvalReport r = classification_metrics(truth, pred, one_hot_scores(pred, 3));
  CHECK(r.accuracy == doctest::Approx(0.8));
  for (int t = 0; t < 3; ++t)
    for (int p = 0; p < 3; ++p) CHECK(r.confusion(t, p) == conf[t][p]);

  // Spreadsheet arithmetic: precision = (2/3, 3/4, 1), recall = (2/3, 1, 3/4).
  CHECK(r.per_class_f1[0] == doctest::Approx(2.0 / 3.0));
  CHECK(r.per_class_f1[1] == doctest::Approx(2.0 * (3.0 / 4.0) / (1.0 + 3.0 / 4.0)));
  CHECK(r.per_class_f1[2] == doctest::Approx(2.0 * (3.0 / 4.0) / (1.0 + 3.0 / 4.0)));
  CHECK(r.macro_f1 ==
        doctest::Approx((r.per_class_f1[0] + r.per_class_f1[1] + r.per_class_f1[2]) / 3.0));
}

TEST_CASE("binary separation gives AUC 1") {
  const std::vector<int> truth = {0, 0, 1, 1};
  const std::vector<int> pred = {0, 0, 1, 1};
  Eigen::MatrixXd scores(4, 2);
  scores << 1, 0, 1, 0, 0, 1, 0, 1;
  const EvalReport r = classification_metrics(truth, pred, scores);
  CHECK(r.macro_auc == doctest::Approx(1.0));
}

TEST_CASE("AUC matches the pairwise-counting oracle and monotone invariance") {
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_index(30));
    std::vector<double> scores;
    std::vector<bool> pos;
    int npos = 0;
    for (int i = 0; i < n; ++i) {
      // Quantized scores force ties through the grouping path.
      scores.push_back(std::round(rng.uniform() * 8.0) / 8.0);
      pos.push_back(rng.uniform() < 0.4);
      npos += pos.back();
    }
    if (npos == 0 || npos == n) continue;
    const double mine = binary_auc(scores, pos);
    CHECK(std::abs(mine - oracle::auc(scores, pos)) <= 1e-12);

    std::vector<double> warped = scores;
    for (double& s : warped) s = std::exp(2.0 * s);  // strictly monotone
    CHECK(binary_auc(warped, pos) == doctest::Approx(mine).epsilon(1e-12));
  }
}

TEST_CASE("absent classes: zero F1, excluded from macro AUC") {
  const std::vector<int> truth = {0, 0, 1, 1};  // class 2 never appears
  const std::vector<int> pred = {0, 0, 1, 1};
  const EvalReport r = classification_metrics(truth, pred, one_hot_scores(pred, 3));
  CHECK(r.per_class_f1[2] == 0.0);
  CHECK(r.macro_f1 == doctest::Approx(2.0 / 3.0));
  CHECK(r.macro_auc == doctest::Approx(1.0));  // over classes 0 and 1 only

  // Single-class truth with a one-class score matrix has no ROC at all.
  const std::vector<int> only = {0, 0};
  CHECK_THROWS_AS(classification_metrics(only, only, one_hot_scores(only, 1)), Error);
  CHECK_THROWS_AS(
      classification_metrics(truth, {0, 0, 1}, one_hot_scores({0, 0, 1}, 3)), Error);
}

TEST_CASE("uia_serialized averages per-gesture accuracies") {
  EvalReport a, b;
  a.accuracy = 1.0;
  b.accuracy = 0.9;
  CHECK(uia_serialized({a, b}) == doctest::Approx(0.95));
  CHECK(uia_serialized({b}) == doctest::Approx(0.9));
  const double mean = uia_serialized({a, b});
  CHECK(mean >= 0.9);
  CHECK(mean <= 1.0);
  CHECK_THROWS_AS(uia_serialized({}), Error);
}

TEST_CASE("eer closed cases") {
  ScoreSet separable;
  separable.genuine = {0.9, 0.9, 0.9};
  separable.impostor = {0.1, 0.1};
  const EerResult r = eer(separable);
  CHECK(r.eer == doctest::Approx(0.0));

  ScoreSet chance;
  chance.genuine = {0.1, 0.4, 0.6, 0.9};
  chance.impostor = {0.1, 0.4, 0.6, 0.9};
  CHECK(eer(chance).eer == doctest::Approx(0.5));

  // Crossing bracket by hand: EER = 1/3 around t in [0.4, 0.5].
  ScoreSet bracket;
  bracket.genuine = {0.9, 0.8, 0.4};
  bracket.impostor = {0.5, 0.3, 0.1};
  const EerResult h = eer(bracket);
  CHECK(h.eer == doctest::Approx(1.0 / 3.0));
  CHECK(h.threshold >= 0.4);
  CHECK(h.threshold <= 0.5);

  CHECK_THROWS_AS(eer(ScoreSet{}), Error);
  ScoreSet bad;
  bad.genuine = {1.5};
  bad.impostor = {0.2};
  CHECK_THROWS_AS(eer(bad), Error);
}

TEST_CASE("eer matches the exhaustive-threshold oracle on random pools") {
  Rng rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    ScoreSet s;
    const int ng = 2 + static_cast<int>(rng.uniform_index(20));
    const int ni = 2 + static_cast<int>(rng.uniform_index(20));
    for (int i = 0; i < ng; ++i) s.genuine.push_back(rng.uniform(0.3, 1.0));
    for (int i = 0; i < ni; ++i) s.impostor.push_back(rng.uniform(0.0, 0.7));
    const EerResult mine = eer(s);
    const auto [ref_eer, ref_thr] = oracle::eer(s.genuine, s.impostor);
    CHECK(std::abs(mine.eer - ref_eer) <= 1e-12);
    CHECK(std::abs(mine.threshold - ref_thr) <= 1e-12);
    CHECK(mine.eer >= 0.0);
    CHECK(mine.eer <= 1.0);
  }
}

TEST_CASE("eer symmetry under pool swap with score reflection") {
  Rng rng(778);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreSet s;
    for (int i = 0; i < 15; ++i) s.genuine.push_back(rng.uniform(0.05, 0.95));
    for (int i = 0; i < 11; ++i) s.impostor.push_back(rng.uniform(0.05, 0.95));
    ScoreSet mirrored;
    for (double v : s.impostor) mirrored.genuine.push_back(1.0 - v);
    for (double v : s.genuine) mirrored.impostor.push_back(1.0 - v);
    CHECK(eer(mirrored).eer == doctest::Approx(eer(s).eer).epsilon(1e-9));
  }
}

TEST_CASE("mean_user_eer averages per-user results") {
  ScoreSet good;
  good.genuine = {0.9, 0.8};
  good.impostor = {0.1, 0.2};
  ScoreSet coin;
  coin.genuine = {0.2, 0.4, 0.6, 0.8};
  coin.impostor = {0.2, 0.4, 0.6, 0.8};
  CHECK(mean_user_eer({good, coin}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(mean_user_eer({}), Error);
}

TEST_CASE("roc_points trace the verification curve") {
  ScoreSet s;
  s.genuine = {0.9, 0.7};
  s.impostor = {0.3, 0.1};
  const auto pts = roc_points(s);
  REQUIRE(pts.size() == 4);
  CHECK(pts.front().fpr == doctest::Approx(1.0));
  CHECK(pts.front().tpr == doctest::Approx(1.0));
  CHECK(pts.back().fpr == doctest::Approx(0.0));
  CHECK(pts.back().tpr == doctest::Approx(0.5));
}
