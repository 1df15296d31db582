#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uq/dataset.hpp"
#include "uq/types.hpp"

namespace uq {

struct Stump {
  int feature = 0;
  double threshold = 0.0;
  double left_value = 0.0;   // x[feature] < threshold
  double right_value = 0.0;  // x[feature] >= threshold
};

/// Additive decision stumps fitted by gradient boosting on logistic loss.
/// Fills the tree-baseline role; raw additive scores pass through a sigmoid,
/// so stump_score always lands in [0, 1].
struct StumpEnsembleModel {
  double prior_logit = 0.0;
  double learning_rate = 0.1;
  std::vector<Stump> stumps;
};

/// Boosts `rounds` stumps (fewer if no split improves the loss). Constant
/// labels yield a prior-only model. Deterministic given the data order.
StumpEnsembleModel train_stumps(const LabeledDataset& data, int rounds, double learning_rate);

/// sigmoid(prior + lr * sum of stump outputs), in [0, 1].
double stump_score(const StumpEnsembleModel& model, const Eigen::VectorXd& x);

std::vector<double> stump_scores(const StumpEnsembleModel& model, const Eigen::MatrixXd& X);

/// [1 - s, s] with class 1 taking the score.
ProbabilityPair score_to_probability_pair(double s);

}  // namespace uq
