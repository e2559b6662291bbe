#pragma once

#include <Eigen/Core>
#include <vector>

#include "mmgest/error.hpp"

namespace mmgest {

struct EvalReport {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double macro_auc = 0.0;
  Eigen::MatrixXi confusion;         // rows = truth, cols = prediction
  std::vector<double> per_class_f1;  // absent classes score 0
};

// Genuine: the score a user's own samples assign to that user; impostor: the
// score other users' samples assign to them. Scores live in [0, 1].
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Accuracy, macro F1 (absent classes contribute 0), and macro one-vs-rest AUC
// (trapezoid over the tie-grouped score ROC; classes without both positives
// and negatives are excluded, and if no class is scorable the call throws
// degenerate_class, or reports NaN AUC when require_auc is false). `scores`
// holds one probability row per sample.
EvalReport classification_metrics(const std::vector<int>& truth,
                                  const std::vector<int>& pred,
                                  const Eigen::MatrixXd& scores,
                                  bool require_auc = true);

// Serialized-mode user accuracy: the unweighted mean of per-gesture accuracies.
double uia_serialized(const std::vector<EvalReport>& per_gesture);

// Operating point where the impostor acceptance rate FPR(t) = P(impostor
// score >= t) crosses the genuine rejection rate FNR(t) = P(genuine < t).
// All distinct scores are swept; without an exact crossing the bracketing
// thresholds are linearly interpolated.
EerResult eer(const ScoreSet& s);

// One EER per user, averaged unweighted.
double mean_user_eer(const std::vector<ScoreSet>& per_user);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;  // impostors accepted at this threshold
  double tpr = 0.0;  // genuines accepted
};

// Verification ROC of a score set, one point per distinct threshold.
std::vector<RocPoint> roc_points(const ScoreSet& s);

// One-vs-rest AUC for a single class; used by classification_metrics and
// exposed for direct checks. Throws degenerate_class without both kinds.
double binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive);

}  // namespace mmgest
