#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "uq/dataset.hpp"
#include "uq/models/net.hpp"
#include "uq/types.hpp"

namespace uq {

struct PriorNetConfig {
  std::vector<int> layer_sizes{64, 64, 32};
  double alpha_in_target = 100.0;  // correct-class concentration of the in-domain target
  double alpha_out_target = 1.0;   // remaining concentrations and the OOD target
  double lambda_weight = 1.0;      // weight of the OOD loss term
  double learning_rate = 0.05;
  int epochs = 1500;
  std::uint64_t seed = 0;

  void validate() const;
};

/// KL( Dir(pred) || Dir(target) ), closed form via log_gamma and digamma.
double dirichlet_reverse_kl(const DirichletParams& pred, const DirichletParams& target);

/// Network whose head parameterizes a Dirichlet: alpha = softplus(z) + 1e-6,
/// trained with reverse KL against sharp in-domain / flat OOD targets.
class PriorNetModel {
 public:
  PriorNetModel() = default;
  PriorNetModel(int input_dim, const PriorNetConfig& config);
  static PriorNetModel from_weights(const PriorNetConfig& config,
                                    std::vector<Eigen::MatrixXd> weights,
                                    std::vector<Eigen::VectorXd> biases);

  Eigen::Index input_dim() const { return net_.input_dim(); }
  const PriorNetConfig& config() const { return config_; }
  const detail::FeedForward& net() const { return net_; }

  std::array<double, 2> logits1(const Eigen::VectorXd& x) const;
  DirichletParams alphas(const Eigen::VectorXd& x) const;

  /// L_in + lambda * L_out, each term a per-set mean.
  double loss(const Eigen::MatrixXd& X_in, const std::vector<int>& y_in,
              const Eigen::MatrixXd& X_ood) const;
  std::vector<double> parameters() const { return net_.flatten(); }
  void set_parameters(const std::vector<double>& theta) { net_.unflatten(theta); }
  std::vector<double> loss_gradient(const Eigen::MatrixXd& X_in, const std::vector<int>& y_in,
                                    const Eigen::MatrixXd& X_ood) const;

  void fit(const Eigen::MatrixXd& X_in, const std::vector<int>& y_in,
           const Eigen::MatrixXd& X_ood);

 private:
  detail::FeedForward net_;
  PriorNetConfig config_;
};

/// Trains on the train split of in_data; ood_features may be empty only when
/// lambda_weight is zero.
PriorNetModel train_priornet(const LabeledDataset& in_data, const Eigen::MatrixXd& ood_features,
                             const PriorNetConfig& config);

DirichletParams priornet_alphas(const PriorNetModel& model, const Eigen::VectorXd& x);

}  // namespace uq
