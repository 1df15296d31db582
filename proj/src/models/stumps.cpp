#include "uq/models/stumps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uq/models/mlp.hpp"

namespace uq {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kProbClamp = 1e-6;
constexpr double kHessianFloor = 1e-12;

}  // namespace

StumpEnsembleModel train_stumps(const LabeledDataset& data, int rounds, double learning_rate) {
  if (rounds < 1) throw std::invalid_argument("train_stumps: rounds must be >= 1");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("train_stumps: learning_rate must be > 0");
  auto [X, y] = detail::training_rows(data);
  if (X.rows() == 0) throw std::invalid_argument("train_stumps: empty training split");
  if (!X.allFinite()) throw std::invalid_argument("train_stumps: non-finite features");

  const auto n = static_cast<std::size_t>(X.rows());
  const auto d = static_cast<std::size_t>(X.cols());

  double positives = 0.0;
  for (int label : y) {
    if (label != 0 && label != 1)
      throw std::invalid_argument("train_stumps: labels must be 0 or 1");
    positives += label;
  }
  const double base_rate =
      std::clamp(positives / static_cast<double>(n), kProbClamp, 1.0 - kProbClamp);

  StumpEnsembleModel model;
  model.learning_rate = learning_rate;
  model.prior_logit = std::log(base_rate / (1.0 - base_rate));
  if (positives == 0.0 || positives == static_cast<double>(n)) return model;  // prior only

  // per-feature sort orders, computed once
  std::vector<std::vector<std::size_t>> orders(d);
  for (std::size_t j = 0; j < d; ++j) {
    orders[j].resize(n);
    std::iota(orders[j].begin(), orders[j].end(), 0);
    std::stable_sort(orders[j].begin(), orders[j].end(), [&, j](std::size_t a, std::size_t b) {
      return X(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) <
             X(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
    });
  }

  std::vector<double> raw(n, model.prior_logit);
  for (int round = 0; round < rounds; ++round) {
    std::vector<double> grad(n), hess(n);
    double g_total = 0.0, h_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(raw[i]);
      grad[i] = static_cast<double>(y[i]) - p;
      hess[i] = std::max(p * (1.0 - p), kHessianFloor);
      g_total += grad[i];
      h_total += hess[i];
    }

    const double base_score = g_total * g_total / h_total;
    double best_gain = 0.0;
    Stump best;
    bool found = false;
    for (std::size_t j = 0; j < d; ++j) {
      const auto& order = orders[j];
      double g_left = 0.0, h_left = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        g_left += grad[order[k]];
        h_left += hess[order[k]];
        const double lo = X(static_cast<Eigen::Index>(order[k]), static_cast<Eigen::Index>(j));
        const double hi =
            X(static_cast<Eigen::Index>(order[k + 1]), static_cast<Eigen::Index>(j));
        if (lo == hi) continue;
        const double g_right = g_total - g_left;
        const double h_right = h_total - h_left;
        const double gain =
            g_left * g_left / h_left + g_right * g_right / h_right - base_score;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best.feature = static_cast<int>(j);
          best.threshold = 0.5 * (lo + hi);
          best.left_value = g_left / h_left;
          best.right_value = g_right / h_right;
          found = true;
        }
      }
    }
    if (!found) break;  // nothing improves the loss

    model.stumps.push_back(best);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = X(static_cast<Eigen::Index>(i), best.feature) < best.threshold
                           ? best.left_value
                           : best.right_value;
      raw[i] += learning_rate * v;
    }
  }
  return model;
}

double stump_score(const StumpEnsembleModel& model, const Eigen::VectorXd& x) {
  double raw = model.prior_logit;
  for (const Stump& s : model.stumps)
    raw += model.learning_rate * (x(s.feature) < s.threshold ? s.left_value : s.right_value);
  return sigmoid(raw);
}

std::vector<double> stump_scores(const StumpEnsembleModel& model, const Eigen::MatrixXd& X) {
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out[static_cast<std::size_t>(i)] = stump_score(model, X.row(i).transpose());
  return out;
}

ProbabilityPair score_to_probability_pair(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("score_to_probability_pair: score must lie in [0, 1]");
  return ProbabilityPair{{1.0 - s, s}};
}

}  // namespace uq
