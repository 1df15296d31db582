#pragma once

#include <Eigen/Dense>

#include "uq/models/mlp.hpp"

namespace uq {

struct CwResult {
  Eigen::VectorXd x_adv;
  bool success = false;   // predicted class flipped relative to the clean input
  double delta_norm = 0.0;
  int original_label = 0;
  int target_label = 0;
};

/// ||delta||_2 + c * max(z_original - z_target, -kappa) at x + delta.
double cw_objective(const MlpModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& delta,
                    int original_label, int target_label, double c, double kappa = 0.0);

Eigen::VectorXd cw_objective_gradient(const MlpModel& model, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& delta, int original_label,
                                      int target_label, double c, double kappa = 0.0);

/// Gradient-descent minimization of the objective above; the target class is
/// the opposite of the model's prediction at x. Returns the smallest-norm
/// flipping iterate, or the lowest-objective iterate when none flips
/// (success=false, not an error). steps=0 returns x unchanged.
CwResult cw_attack(const MlpModel& model, const Eigen::VectorXd& x, double c, int steps,
                   double step_size, double kappa = 0.0);

/// Attacks a seeded sample of rows and stacks the perturbed points; the OOD
/// source for Dirichlet-head training.
Eigen::MatrixXd cw_generate_ood(const MlpModel& model, const Eigen::MatrixXd& X, double c,
                                int steps, double step_size, int max_points,
                                std::uint64_t seed);

}  // namespace uq
