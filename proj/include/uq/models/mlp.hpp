#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "uq/dataset.hpp"
#include "uq/models/net.hpp"
#include "uq/types.hpp"

namespace uq {

struct MlpConfig {
  std::vector<int> layer_sizes{64, 64, 32};  // hidden widths; the output width is 2
  double dropout_rate = 0.2;
  bool use_skip_connections = true;
  double learning_rate = 0.1;
  int epochs = 300;
  int batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;

  void validate() const;
};

struct Prediction {
  std::array<double, 2> logits;
  ProbabilityPair probs;
};

/// Two-class relu MLP trained with softmax cross-entropy.
class MlpModel {
 public:
  MlpModel() = default;
  MlpModel(int input_dim, const MlpConfig& config);
  static MlpModel from_weights(const MlpConfig& config, std::vector<Eigen::MatrixXd> weights,
                               std::vector<Eigen::VectorXd> biases);

  Eigen::Index input_dim() const { return net_.input_dim(); }
  const MlpConfig& config() const { return config_; }
  const detail::FeedForward& net() const { return net_; }

  /// Pre-softmax logits, one row per sample. Evaluation mode (no dropout).
  Eigen::MatrixXd logits(const Eigen::MatrixXd& X) const;
  std::array<double, 2> logits1(const Eigen::VectorXd& x) const;

  /// Mean cross-entropy over the batch, evaluation mode.
  double loss(const Eigen::MatrixXd& X, const std::vector<int>& y) const;
  std::vector<double> parameters() const { return net_.flatten(); }
  void set_parameters(const std::vector<double>& theta) { net_.unflatten(theta); }
  std::vector<double> loss_gradient(const Eigen::MatrixXd& X, const std::vector<int>& y) const;

  /// Gradient of upstream . logits(x) with respect to x.
  Eigen::VectorXd input_gradient(const Eigen::VectorXd& x, const Eigen::Vector2d& upstream) const;

  /// Runs config.epochs of seeded gradient descent on (X, y).
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y);

 private:
  detail::FeedForward net_;
  MlpConfig config_;
};

/// Trains on the train split (or on every row when the dataset is untagged).
MlpModel train_mlp(const LabeledDataset& data, const MlpConfig& config);

Prediction predict_proba(const MlpModel& model, const Eigen::VectorXd& x);

ProbabilityPair softmax_pair(const std::array<double, 2>& logits);

namespace detail {
// Shared by trainers: the rows a model trains on.
std::pair<Eigen::MatrixXd, std::vector<int>> training_rows(const LabeledDataset& data);
}  // namespace detail

}  // namespace uq
