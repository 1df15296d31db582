#include "uq/models/mlp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uq {

void MlpConfig::validate() const {
  if (layer_sizes.empty())
    throw std::invalid_argument("MlpConfig: need at least one hidden layer");
  for (int h : layer_sizes)
    if (h <= 0) throw std::invalid_argument("MlpConfig: hidden sizes must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw std::invalid_argument("MlpConfig: dropout_rate must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("MlpConfig: learning_rate must be > 0");
  if (epochs <= 0) throw std::invalid_argument("MlpConfig: epochs must be positive");
  if (batch_size < 0) throw std::invalid_argument("MlpConfig: batch_size must be >= 0");
}

MlpModel::MlpModel(int input_dim, const MlpConfig& config) : config_(config) {
  config.validate();
  net_ = detail::FeedForward::he_init(input_dim, config.layer_sizes, kNumClasses,
                                      config.use_skip_connections, config.seed);
}

MlpModel MlpModel::from_weights(const MlpConfig& config, std::vector<Eigen::MatrixXd> weights,
                                std::vector<Eigen::VectorXd> biases) {
  config.validate();
  if (weights.size() != config.layer_sizes.size() + 1 || weights.size() != biases.size())
    throw std::invalid_argument("MlpModel: weight count does not match the configuration");
  MlpModel model;
  model.config_ = config;
  model.net_.use_skip = config.use_skip_connections;
  model.net_.W = std::move(weights);
  model.net_.b = std::move(biases);
  return model;
}

Eigen::MatrixXd MlpModel::logits(const Eigen::MatrixXd& X) const {
  return net_.forward(X, 0.0, nullptr).logits();
}

std::array<double, 2> MlpModel::logits1(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd z = logits(x.transpose());
  return {z(0, 0), z(0, 1)};
}

ProbabilityPair softmax_pair(const std::array<double, 2>& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return ProbabilityPair{{e0 / z, e1 / z}};
}

namespace {

void validate_batch(const Eigen::MatrixXd& X, const std::vector<int>& y) {
  if (X.rows() == 0) throw std::invalid_argument("mlp: empty batch");
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw std::invalid_argument("mlp: features and labels differ in length");
  if (!X.allFinite()) throw std::invalid_argument("mlp: non-finite features");
  for (int label : y)
    if (label != 0 && label != 1) throw std::invalid_argument("mlp: labels must be 0 or 1");
}

// mean cross-entropy and its logit gradient
double ce_from_logits(const Eigen::MatrixXd& z, const std::vector<int>& y,
                      Eigen::MatrixXd* d_logits) {
  const auto n = static_cast<double>(z.rows());
  double loss = 0.0;
  if (d_logits) d_logits->resize(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = std::max(z(i, 0), z(i, 1));
    const double e0 = std::exp(z(i, 0) - m), e1 = std::exp(z(i, 1) - m);
    const double lse = m + std::log(e0 + e1);
    const int label = y[static_cast<std::size_t>(i)];
    loss += lse - z(i, label);
    if (d_logits) {
      (*d_logits)(i, 0) = (e0 / (e0 + e1) - (label == 0 ? 1.0 : 0.0)) / n;
      (*d_logits)(i, 1) = (e1 / (e0 + e1) - (label == 1 ? 1.0 : 0.0)) / n;
    }
  }
  return loss / n;
}

}  // namespace

double MlpModel::loss(const Eigen::MatrixXd& X, const std::vector<int>& y) const {
  validate_batch(X, y);
  return ce_from_logits(logits(X), y, nullptr);
}

std::vector<double> MlpModel::loss_gradient(const Eigen::MatrixXd& X,
                                            const std::vector<int>& y) const {
  validate_batch(X, y);
  const detail::ForwardCache cache = net_.forward(X, 0.0, nullptr);
  Eigen::MatrixXd d_logits;
  ce_from_logits(cache.logits(), y, &d_logits);
  return detail::FeedForward::flatten_grads(net_.backward(cache, d_logits, false));
}

Eigen::VectorXd MlpModel::input_gradient(const Eigen::VectorXd& x,
                                         const Eigen::Vector2d& upstream) const {
  const detail::ForwardCache cache = net_.forward(x.transpose(), 0.0, nullptr);
  const detail::Grads grads = net_.backward(cache, upstream.transpose(), true);
  return grads.dX.row(0).transpose();
}

void MlpModel::fit(const Eigen::MatrixXd& X, const std::vector<int>& y) {
  validate_batch(X, y);
  // separate stream from the init draw, still fully determined by the seed
  std::mt19937_64 rng(config_.seed ^ 0x9e3779b97f4a7c15ull);
  std::mt19937_64* dropout_rng = config_.dropout_rate > 0.0 ? &rng : nullptr;

  const auto train_step = [&](const Eigen::MatrixXd& bx, const std::vector<int>& by) {
    const detail::ForwardCache cache = net_.forward(bx, config_.dropout_rate, dropout_rng);
    Eigen::MatrixXd d_logits;
    ce_from_logits(cache.logits(), by, &d_logits);
    net_.step(net_.backward(cache, d_logits, false), config_.learning_rate);
  };

  if (config_.batch_size == 0 || config_.batch_size >= X.rows()) {
    for (int epoch = 0; epoch < config_.epochs; ++epoch) train_step(X, y);
    return;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(config_.seed ^ 0xd1b54a32d192ed03ull);
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config_.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config_.batch_size));
      Eigen::MatrixXd bx(static_cast<Eigen::Index>(stop - start), X.cols());
      std::vector<int> by(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        bx.row(static_cast<Eigen::Index>(k - start)) = X.row(order[k]);
        by[k - start] = y[static_cast<std::size_t>(order[k])];
      }
      train_step(bx, by);
    }
  }
}

namespace detail {
std::pair<Eigen::MatrixXd, std::vector<int>> training_rows(const LabeledDataset& data) {
  if (data.has_splits()) return {data.features_of(Split::Train), data.labels_of(Split::Train)};
  return {data.features, data.labels};
}
}  // namespace detail

MlpModel train_mlp(const LabeledDataset& data, const MlpConfig& config) {
  auto [X, y] = detail::training_rows(data);
  if (X.rows() == 0) throw std::invalid_argument("train_mlp: empty training split");
  MlpModel model(static_cast<int>(X.cols()), config);
  model.fit(X, y);
  return model;
}

Prediction predict_proba(const MlpModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.input_dim())
    throw std::invalid_argument("predict_proba: input has dimension " + std::to_string(x.size()) +
                                ", model expects " + std::to_string(model.input_dim()));
  Prediction pred;
  pred.logits = model.logits1(x);
  pred.probs = softmax_pair(pred.logits);
  return pred;
}

}  // namespace uq
