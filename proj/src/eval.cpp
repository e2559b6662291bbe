#include "mmgest/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>

namespace mmgest {

EvalReport classification_metrics(const std::vector<int>& truth,
                                  const std::vector<int>& pred,
                                  const Eigen::MatrixXd& scores, bool require_auc) {
  const std::size_t n = truth.size();
  if (pred.size() != n || static_cast<std::size_t>(scores.rows()) != n)
    fail(Errc::length_mismatch, "classification_metrics: input lengths differ");
  if (n == 0) fail(Errc::length_mismatch, "classification_metrics: no samples");
  const int classes = static_cast<int>(scores.cols());
  for (std::size_t i = 0; i < n; ++i)
    if (truth[i] < 0 || truth[i] >= classes || pred[i] < 0 || pred[i] >= classes)
      fail(Errc::label_out_of_range, "classification_metrics: label outside score width");

  EvalReport report;
  report.confusion = Eigen::MatrixXi::Zero(classes, classes);
  for (std::size_t i = 0; i < n; ++i) report.confusion(truth[i], pred[i]) += 1;
  report.accuracy =
      static_cast<double>(report.confusion.diagonal().sum()) / static_cast<double>(n);

  report.per_class_f1.resize(static_cast<std::size_t>(classes), 0.0);
  double f1_sum = 0.0;
  for (int c = 0; c < classes; ++c) {
    const double tp = report.confusion(c, c);
    const double row = report.confusion.row(c).sum();
    const double col = report.confusion.col(c).sum();
    const double precision = col > 0 ? tp / col : 0.0;
    const double recall = row > 0 ? tp / row : 0.0;
    const double f1 =
        (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    report.per_class_f1[static_cast<std::size_t>(c)] = f1;
    f1_sum += f1;
  }
  report.macro_f1 = f1_sum / static_cast<double>(classes);

  double auc_sum = 0.0;
  int auc_classes = 0;
  std::vector<double> class_scores(n);
  std::vector<bool> positive(n);
  for (int c = 0; c < classes; ++c) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      class_scores[i] = scores(static_cast<Eigen::Index>(i), c);
      positive[i] = truth[i] == c;
      pos += positive[i];
    }
    if (pos == 0 || pos == n) continue;  // absent or all-covering class: no ROC
    auc_sum += binary_auc(class_scores, positive);
    ++auc_classes;
  }
  if (auc_classes == 0) {
    if (require_auc)
      fail(Errc::degenerate_class, "classification_metrics: no class admits an ROC");
    report.macro_auc = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.macro_auc = auc_sum / static_cast<double>(auc_classes);
  return report;
}

double binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  const std::size_t n = scores.size();
  if (positive.size() != n) fail(Errc::length_mismatch, "binary_auc: lengths differ");
  std::size_t total_pos = 0;
  for (bool b : positive) total_pos += b;
  const std::size_t total_neg = n - total_pos;
  if (total_pos == 0 || total_neg == 0)
    fail(Errc::degenerate_class, "binary_auc: need both positives and negatives");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Sweep thresholds downward, grouping ties, and integrate the ROC with the
  // trapezoid rule.
  double area = 0.0;
  double prev_tpr = 0.0, prev_fpr = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < n) {
    const double s = scores[order[i]];
    while (i < n && scores[order[i]] == s) {
      if (positive[order[i]]) ++tp;
      else ++fp;
      ++i;
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double fpr = static_cast<double>(fp) / static_cast<double>(total_neg);
    area += 0.5 * (tpr + prev_tpr) * (fpr - prev_fpr);
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  return area;
}

double uia_serialized(const std::vector<EvalReport>& per_gesture) {
  if (per_gesture.empty()) fail(Errc::empty_list, "uia_serialized: no reports");
  double sum = 0.0;
  for (const EvalReport& r : per_gesture) sum += r.accuracy;
  return sum / static_cast<double>(per_gesture.size());
}

EerResult eer(const ScoreSet& s) {
  if (s.genuine.empty() || s.impostor.empty())
    fail(Errc::empty_pool, "eer: both score pools must be non-empty");
  for (double v : s.genuine)
    if (!(v >= 0.0 && v <= 1.0)) fail(Errc::bad_config, "eer: scores must lie in [0,1]");
  for (double v : s.impostor)
    if (!(v >= 0.0 && v <= 1.0)) fail(Errc::bad_config, "eer: scores must lie in [0,1]");

  std::vector<double> genuine = s.genuine;
  std::vector<double> impostor = s.impostor;
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());

  std::set<double> threshold_set(genuine.begin(), genuine.end());
  threshold_set.insert(impostor.begin(), impostor.end());
  std::vector<double> thresholds(threshold_set.begin(), threshold_set.end());
  thresholds.push_back(*threshold_set.rbegin() + 1.0);  // above-max sentinel

  const auto counts_at = [&](double t) {
    // (# impostor >= t, # genuine < t)
    const std::size_t imp =
        impostor.end() - std::lower_bound(impostor.begin(), impostor.end(), t);
    const std::size_t gen =
        std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    return std::pair<std::size_t, std::size_t>(imp, gen);
  };

  const double ni = static_cast<double>(impostor.size());
  const double ng = static_cast<double>(genuine.size());

  double prev_t = thresholds.front();
  auto [prev_imp, prev_gen] = counts_at(prev_t);
  for (double t : thresholds) {
    const auto [imp, gen] = counts_at(t);
    // Exact crossing: FPR == FNR as rationals.
    if (imp * genuine.size() == gen * impostor.size())
      return {static_cast<double>(imp) / ni, t};
    const double fpr = static_cast<double>(imp) / ni;
    const double fnr = static_cast<double>(gen) / ng;
    if (fpr < fnr) {
      // Crossed between prev_t and t; interpolate both rates linearly.
      const double fpr_lo = static_cast<double>(prev_imp) / ni;
      const double fnr_lo = static_cast<double>(prev_gen) / ng;
      const double d_lo = fpr_lo - fnr_lo;
      const double d_hi = fpr - fnr;
      const double alpha = d_lo / (d_lo - d_hi);
      return {fpr_lo + alpha * (fpr - fpr_lo), prev_t + alpha * (t - prev_t)};
    }
    prev_t = t;
    prev_imp = imp;
    prev_gen = gen;
  }
  // FPR stays above FNR through the sentinel: impossible, the sentinel has
  // FPR 0 and FNR 1.
  fail(Errc::degenerate_class, "eer: no crossing found");
}

double mean_user_eer(const std::vector<ScoreSet>& per_user) {
  if (per_user.empty()) fail(Errc::empty_list, "mean_user_eer: no users");
  double sum = 0.0;
  for (const ScoreSet& s : per_user) sum += eer(s).eer;
  return sum / static_cast<double>(per_user.size());
}

std::vector<RocPoint> roc_points(const ScoreSet& s) {
  if (s.genuine.empty() || s.impostor.empty())
    fail(Errc::empty_pool, "roc_points: both score pools must be non-empty");
  std::vector<double> genuine = s.genuine;
  std::vector<double> impostor = s.impostor;
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());
  std::set<double> thresholds(genuine.begin(), genuine.end());
  thresholds.insert(impostor.begin(), impostor.end());

  std::vector<RocPoint> out;
  for (double t : thresholds) {
    RocPoint p;
    p.threshold = t;
    p.fpr = static_cast<double>(impostor.end() -
                                std::lower_bound(impostor.begin(), impostor.end(), t)) /
            static_cast<double>(impostor.size());
    p.tpr = static_cast<double>(genuine.end() -
                                std::lower_bound(genuine.begin(), genuine.end(), t)) /
            static_cast<double>(genuine.size());
    out.push_back(p);
  }
  return out;
}

}  // namespace mmgest
