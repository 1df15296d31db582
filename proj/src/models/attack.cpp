#include "uq/models/attack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace uq {

namespace {

constexpr double kNormGuard = 1e-12;

void validate_attack_inputs(const MlpModel& model, const Eigen::VectorXd& x, double c) {
  if (x.size() != model.input_dim())
    throw std::invalid_argument("cw: input dimension does not match the model");
  if (!(c > 0.0)) throw std::invalid_argument("cw: c must be positive");
  if (!x.allFinite()) throw std::invalid_argument("cw: non-finite input");
}

double margin(const MlpModel& model, const Eigen::VectorXd& point, int original_label,
              int target_label) {
  const auto z = model.logits1(point);
  return z[static_cast<std::size_t>(original_label)] - z[static_cast<std::size_t>(target_label)];
}

}  // namespace

double cw_objective(const MlpModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& delta,
                    int original_label, int target_label, double c, double kappa) {
  validate_attack_inputs(model, x, c);
  const double m = margin(model, x + delta, original_label, target_label);
  return delta.norm() + c * std::max(m, -kappa);
}

Eigen::VectorXd cw_objective_gradient(const MlpModel& model, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& delta, int original_label,
                                      int target_label, double c, double kappa) {
  validate_attack_inputs(model, x, c);
  const double norm = delta.norm();
  Eigen::VectorXd grad =
      norm > kNormGuard ? (delta / norm).eval() : Eigen::VectorXd::Zero(delta.size()).eval();
  if (margin(model, x + delta, original_label, target_label) > -kappa) {
    Eigen::Vector2d upstream = Eigen::Vector2d::Zero();
    upstream(original_label) = 1.0;
    upstream(target_label) = -1.0;
    grad += c * model.input_gradient(x + delta, upstream);
  }
  return grad;
}

CwResult cw_attack(const MlpModel& model, const Eigen::VectorXd& x, double c, int steps,
                   double step_size, double kappa) {
  validate_attack_inputs(model, x, c);
  if (steps < 0) throw std::invalid_argument("cw: steps must be >= 0");
  if (!(step_size > 0.0)) throw std::invalid_argument("cw: step_size must be positive");

  CwResult result;
  result.original_label = predict_proba(model, x).probs.predicted_label();
  result.target_label = 1 - result.original_label;
  result.x_adv = x;
  result.delta_norm = 0.0;
  result.success = false;

  Eigen::VectorXd delta = Eigen::VectorXd::Zero(x.size());
  double best_flip_norm = std::numeric_limits<double>::infinity();
  double best_objective = cw_objective(model, x, delta, result.original_label,
                                       result.target_label, c, kappa);
  Eigen::VectorXd best_any = delta;

  for (int step = 0; step < steps; ++step) {
    delta -= step_size * cw_objective_gradient(model, x, delta, result.original_label,
                                               result.target_label, c, kappa);
    const Eigen::VectorXd candidate = x + delta;
    const int pred = predict_proba(model, candidate).probs.predicted_label();
    if (pred != result.original_label && delta.norm() < best_flip_norm) {
      best_flip_norm = delta.norm();
      result.x_adv = candidate;
      result.success = true;
    }
    const double obj =
        cw_objective(model, x, delta, result.original_label, result.target_label, c, kappa);
    if (obj < best_objective) {
      best_objective = obj;
      best_any = delta;
    }
  }
  if (!result.success) result.x_adv = x + best_any;
  result.delta_norm = (result.x_adv - x).norm();
  return result;
}

Eigen::MatrixXd cw_generate_ood(const MlpModel& model, const Eigen::MatrixXd& X, double c,
                                int steps, double step_size, int max_points,
                                std::uint64_t seed) {
  if (X.rows() == 0) throw std::invalid_argument("cw_generate_ood: empty source matrix");
  if (max_points < 1) throw std::invalid_argument("cw_generate_ood: max_points must be >= 1");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(max_points));

  Eigen::MatrixXd out(static_cast<Eigen::Index>(take), X.cols());
  for (std::size_t k = 0; k < take; ++k) {
    const CwResult r = cw_attack(model, X.row(order[k]).transpose(), c, steps, step_size);
    out.row(static_cast<Eigen::Index>(k)) = r.x_adv.transpose();
  }
  return out;
}

}  // namespace uq
