#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace uq::detail {

struct ForwardCache {
  // activations[0] is the input batch; activations[k] for k >= 1 are hidden
  // activations after relu, skip addition and (training only) dropout.
  std::vector<Eigen::MatrixXd> activations;
  // preacts[k] is the pre-activation producing activations[k+1]; the last
  // entry is the logit matrix.
  std::vector<Eigen::MatrixXd> preacts;
  // scaled dropout masks per hidden activation (empty in eval mode)
  std::vector<Eigen::MatrixXd> masks;

  const Eigen::MatrixXd& logits() const { return preacts.back(); }
};

struct Grads {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
  Eigen::MatrixXd dX;
};

/// Plain fully connected relu network with optional length-2 skip
/// connections: a[k] = relu(z_k) + a[k-2] wherever the widths agree. The
/// output layer stays affine.
struct FeedForward {
  std::vector<Eigen::MatrixXd> W;  // W[l] is (out x in)
  std::vector<Eigen::VectorXd> b;
  bool use_skip = false;

  Eigen::Index input_dim() const { return W.front().cols(); }
  std::size_t num_layers() const { return W.size(); }

  bool skip_into(std::size_t activation_index) const {
    // hidden activations only; the source is two activations back
    return use_skip && activation_index >= 2 && activation_index < num_layers() &&
           W[activation_index - 1].rows() ==
               (activation_index == 2 ? W[0].cols() : W[activation_index - 3].rows());
  }

  static FeedForward he_init(int input_dim, const std::vector<int>& hidden_sizes, int output_dim,
                             bool use_skip, std::uint64_t seed);

  ForwardCache forward(const Eigen::MatrixXd& X, double dropout_rate,
                       std::mt19937_64* rng) const;

  /// Backprop from dL/dlogits. Fills parameter grads; dX only when requested.
  Grads backward(const ForwardCache& cache, const Eigen::MatrixXd& d_logits, bool want_dx) const;

  void step(const Grads& grads, double learning_rate);

  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& theta);
  static std::vector<double> flatten_grads(const Grads& grads);
};

}  // namespace uq::detail
