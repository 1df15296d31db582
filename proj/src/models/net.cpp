#include "uq/models/net.hpp"

#include <cmath>
#include <stdexcept>

namespace uq::detail {

FeedForward FeedForward::he_init(int input_dim, const std::vector<int>& hidden_sizes,
                                 int output_dim, bool use_skip, std::uint64_t seed) {
  if (input_dim <= 0) throw std::invalid_argument("net: input dimension must be positive");
  if (hidden_sizes.empty()) throw std::invalid_argument("net: need at least one hidden layer");
  for (int h : hidden_sizes)
    if (h <= 0) throw std::invalid_argument("net: hidden sizes must be positive");

  FeedForward net;
  net.use_skip = use_skip;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int fan_in = input_dim;
  const auto add_layer = [&](int fan_out) {
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = gauss(rng) * scale;
    net.W.push_back(std::move(w));
    net.b.push_back(Eigen::VectorXd::Zero(fan_out));
    fan_in = fan_out;
  };
  for (int h : hidden_sizes) add_layer(h);
  add_layer(output_dim);
  return net;
}

ForwardCache FeedForward::forward(const Eigen::MatrixXd& X, double dropout_rate,
                                  std::mt19937_64* rng) const {
  if (X.cols() != input_dim())
    throw std::invalid_argument("net: input has dimension " + std::to_string(X.cols()) +
                                ", model expects " + std::to_string(input_dim()));
  const bool training = rng != nullptr && dropout_rate > 0.0;
  ForwardCache cache;
  cache.activations.reserve(num_layers());
  cache.preacts.reserve(num_layers());
  cache.activations.push_back(X);
  if (training) cache.masks.resize(num_layers());  // index by activation, [0] unused

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z =
        (cache.activations[l] * W[l].transpose()).rowwise() + b[l].transpose();
    cache.preacts.push_back(z);
    if (l + 1 == num_layers()) break;  // output layer stays affine

    Eigen::MatrixXd a = z.cwiseMax(0.0);
    if (skip_into(l + 1)) a += cache.activations[l - 1];
    if (training) {
      Eigen::MatrixXd mask(a.rows(), a.cols());
      const double keep = 1.0 - dropout_rate;
      for (Eigen::Index r = 0; r < mask.rows(); ++r)
        for (Eigen::Index c = 0; c < mask.cols(); ++c)
          mask(r, c) = unif(*rng) < dropout_rate ? 0.0 : 1.0 / keep;
      a = a.cwiseProduct(mask);
      cache.masks[l + 1] = std::move(mask);
    }
    cache.activations.push_back(std::move(a));
  }
  return cache;
}

Grads FeedForward::backward(const ForwardCache& cache, const Eigen::MatrixXd& d_logits,
                            bool want_dx) const {
  const std::size_t layers = num_layers();
  Grads grads;
  grads.dW.resize(layers);
  grads.db.resize(layers);

  std::vector<Eigen::MatrixXd> d_act(layers);  // gradient wrt activations[k]
  Eigen::MatrixXd dz = d_logits;
  for (std::size_t l = layers; l-- > 0;) {
    grads.dW[l] = dz.transpose() * cache.activations[l];
    grads.db[l] = dz.colwise().sum().transpose();
    Eigen::MatrixXd contrib = dz * W[l];
    if (l == 0) {
      if (want_dx) {
        grads.dX = std::move(contrib);
        if (!d_act.empty() && d_act[0].size() != 0) grads.dX += d_act[0];
      }
      break;
    }
    if (d_act[l].size() != 0)
      d_act[l] += contrib;
    else
      d_act[l] = std::move(contrib);

    // through dropout, then split between the relu branch and the skip source
    Eigen::MatrixXd upstream = cache.masks.empty() || cache.masks[l].size() == 0
                                   ? d_act[l]
                                   : d_act[l].cwiseProduct(cache.masks[l]).eval();
    if (skip_into(l)) {
      if (l >= 2) {
        if (d_act[l - 2].size() != 0)
          d_act[l - 2] += upstream;
        else
          d_act[l - 2] = upstream;
      }
    }
    const Eigen::MatrixXd& z = cache.preacts[l - 1];
    dz = upstream.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
  }
  return grads;
}

void FeedForward::step(const Grads& grads, double learning_rate) {
  for (std::size_t l = 0; l < num_layers(); ++l) {
    W[l] -= learning_rate * grads.dW[l];
    b[l] -= learning_rate * grads.db[l];
  }
}

std::vector<double> FeedForward::flatten() const {
  std::vector<double> theta;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    theta.insert(theta.end(), W[l].data(), W[l].data() + W[l].size());
    theta.insert(theta.end(), b[l].data(), b[l].data() + b[l].size());
  }
  return theta;
}

void FeedForward::unflatten(const std::vector<double>& theta) {
  std::size_t pos = 0;
  for (std::size_t l = 0; l < num_layers(); ++l) {
    if (pos + static_cast<std::size_t>(W[l].size() + b[l].size()) > theta.size())
      throw std::invalid_argument("net: parameter vector too short");
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(pos),
              theta.begin() + static_cast<std::ptrdiff_t>(pos + W[l].size()), W[l].data());
    pos += static_cast<std::size_t>(W[l].size());
    std::copy(theta.begin() + static_cast<std::ptrdiff_t>(pos),
              theta.begin() + static_cast<std::ptrdiff_t>(pos + b[l].size()), b[l].data());
    pos += static_cast<std::size_t>(b[l].size());
  }
  if (pos != theta.size()) throw std::invalid_argument("net: parameter vector too long");
}

std::vector<double> FeedForward::flatten_grads(const Grads& grads) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < grads.dW.size(); ++l) {
    flat.insert(flat.end(), grads.dW[l].data(), grads.dW[l].data() + grads.dW[l].size());
    flat.insert(flat.end(), grads.db[l].data(), grads.db[l].data() + grads.db[l].size());
  }
  return flat;
}

}  // namespace uq::detail
