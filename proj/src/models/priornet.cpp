#include "uq/models/priornet.hpp"

#include <cmath>
#include <stdexcept>

#include "uq/models/mlp.hpp"
#include "uq/numerics.hpp"

namespace uq {

namespace {

constexpr double kAlphaFloor = 1e-6;

double softplus(double z) {
  if (z > 30.0) return z;
  if (z < -30.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

DirichletParams alphas_from_logits(double z0, double z1) {
  return DirichletParams::make(softplus(z0) + kAlphaFloor, softplus(z1) + kAlphaFloor);
}

// d KL(Dir(a) || Dir(b)) / d a_j = (a_j - b_j) psi'(a_j) - sum_k(a_k - b_k) psi'(a_0)
std::array<double, 2> reverse_kl_alpha_grad(const DirichletParams& pred,
                                            const DirichletParams& target) {
  const double diff_sum =
      (pred.alphas[0] - target.alphas[0]) + (pred.alphas[1] - target.alphas[1]);
  const double tg_a0 = trigamma(pred.alpha0);
  std::array<double, 2> g{};
  for (int j = 0; j < kNumClasses; ++j)
    g[static_cast<std::size_t>(j)] =
        (pred.alphas[static_cast<std::size_t>(j)] - target.alphas[static_cast<std::size_t>(j)]) *
            trigamma(pred.alphas[static_cast<std::size_t>(j)]) -
        diff_sum * tg_a0;
  return g;
}

void validate_sets(const Eigen::MatrixXd& X_in, const std::vector<int>& y_in,
                   const Eigen::MatrixXd& X_ood, double lambda_weight) {
  if (X_in.rows() == 0) throw std::invalid_argument("priornet: empty in-domain data");
  if (static_cast<std::size_t>(X_in.rows()) != y_in.size())
    throw std::invalid_argument("priornet: features and labels differ in length");
  if (!X_in.allFinite() || !X_ood.allFinite())
    throw std::invalid_argument("priornet: non-finite features");
  for (int label : y_in)
    if (label != 0 && label != 1) throw std::invalid_argument("priornet: labels must be 0 or 1");
  if (lambda_weight > 0.0 && X_ood.rows() == 0)
    throw std::invalid_argument("priornet: OOD data required when lambda_weight > 0");
  if (X_ood.rows() > 0 && X_ood.cols() != X_in.cols())
    throw std::invalid_argument("priornet: OOD dimension differs from in-domain dimension");
}

}  // namespace

void PriorNetConfig::validate() const {
  if (layer_sizes.empty())
    throw std::invalid_argument("PriorNetConfig: need at least one hidden layer");
  for (int h : layer_sizes)
    if (h <= 0) throw std::invalid_argument("PriorNetConfig: hidden sizes must be positive");
  if (!(alpha_in_target > alpha_out_target && alpha_out_target > 0.0))
    throw std::invalid_argument("PriorNetConfig: need alpha_in_target > alpha_out_target > 0");
  if (!(lambda_weight >= 0.0))
    throw std::invalid_argument("PriorNetConfig: lambda_weight must be >= 0");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("PriorNetConfig: learning_rate must be > 0");
  if (epochs <= 0) throw std::invalid_argument("PriorNetConfig: epochs must be positive");
}

double dirichlet_reverse_kl(const DirichletParams& pred, const DirichletParams& target) {
  for (const DirichletParams* d : {&pred, &target})
    if (!(d->alphas[0] > 0.0 && d->alphas[1] > 0.0))
      throw std::invalid_argument("dirichlet_reverse_kl: concentrations must be positive");
  double kl = log_gamma(pred.alpha0) - log_gamma(target.alpha0);
  for (int k = 0; k < kNumClasses; ++k) {
    const auto j = static_cast<std::size_t>(k);
    kl -= log_gamma(pred.alphas[j]);
    kl += log_gamma(target.alphas[j]);
    kl += (pred.alphas[j] - target.alphas[j]) * (digamma(pred.alphas[j]) - digamma(pred.alpha0));
  }
  // the exact value is nonnegative; absorb rounding noise near zero
  if (kl < 0.0 && kl > -1e-9) kl = 0.0;
  return kl;
}

PriorNetModel::PriorNetModel(int input_dim, const PriorNetConfig& config) : config_(config) {
  config.validate();
  net_ = detail::FeedForward::he_init(input_dim, config.layer_sizes, kNumClasses,
                                      /*use_skip=*/false, config.seed);
}

PriorNetModel PriorNetModel::from_weights(const PriorNetConfig& config,
                                          std::vector<Eigen::MatrixXd> weights,
                                          std::vector<Eigen::VectorXd> biases) {
  config.validate();
  if (weights.size() != config.layer_sizes.size() + 1 || weights.size() != biases.size())
    throw std::invalid_argument("PriorNetModel: weight count does not match the configuration");
  PriorNetModel model;
  model.config_ = config;
  model.net_.use_skip = false;
  model.net_.W = std::move(weights);
  model.net_.b = std::move(biases);
  return model;
}

std::array<double, 2> PriorNetModel::logits1(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd z = net_.forward(x.transpose(), 0.0, nullptr).logits();
  return {z(0, 0), z(0, 1)};
}

DirichletParams PriorNetModel::alphas(const Eigen::VectorXd& x) const {
  const auto z = logits1(x);
  return alphas_from_logits(z[0], z[1]);
}

double PriorNetModel::loss(const Eigen::MatrixXd& X_in, const std::vector<int>& y_in,
                           const Eigen::MatrixXd& X_ood) const {
  validate_sets(X_in, y_in, X_ood, config_.lambda_weight);
  const DirichletParams ood_target =
      DirichletParams::make(config_.alpha_out_target, config_.alpha_out_target);

  const Eigen::MatrixXd z_in = net_.forward(X_in, 0.0, nullptr).logits();
  double loss_in = 0.0;
  for (Eigen::Index i = 0; i < z_in.rows(); ++i) {
    const int y = y_in[static_cast<std::size_t>(i)];
    const DirichletParams target =
        DirichletParams::make(y == 0 ? config_.alpha_in_target : config_.alpha_out_target,
                              y == 1 ? config_.alpha_in_target : config_.alpha_out_target);
    loss_in += dirichlet_reverse_kl(alphas_from_logits(z_in(i, 0), z_in(i, 1)), target);
  }
  loss_in /= static_cast<double>(z_in.rows());

  double loss_out = 0.0;
  if (config_.lambda_weight > 0.0 && X_ood.rows() > 0) {
    const Eigen::MatrixXd z_ood = net_.forward(X_ood, 0.0, nullptr).logits();
    for (Eigen::Index i = 0; i < z_ood.rows(); ++i)
      loss_out += dirichlet_reverse_kl(alphas_from_logits(z_ood(i, 0), z_ood(i, 1)), ood_target);
    loss_out /= static_cast<double>(z_ood.rows());
  }
  return loss_in + config_.lambda_weight * loss_out;
}

namespace {

// Fills d_logits for one forward batch under a per-sample Dirichlet target.
template <typename TargetFor>
Eigen::MatrixXd kl_logit_grad(const Eigen::MatrixXd& z, TargetFor&& target_for, double weight) {
  Eigen::MatrixXd d_logits(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const DirichletParams pred = alphas_from_logits(z(i, 0), z(i, 1));
    const DirichletParams target = target_for(i);
    const auto g_alpha = reverse_kl_alpha_grad(pred, target);
    d_logits(i, 0) = weight * g_alpha[0] * sigmoid(z(i, 0));
    d_logits(i, 1) = weight * g_alpha[1] * sigmoid(z(i, 1));
  }
  return d_logits;
}

}  // namespace

std::vector<double> PriorNetModel::loss_gradient(const Eigen::MatrixXd& X_in,
                                                 const std::vector<int>& y_in,
                                                 const Eigen::MatrixXd& X_ood) const {
  validate_sets(X_in, y_in, X_ood, config_.lambda_weight);
  const detail::ForwardCache cache_in = net_.forward(X_in, 0.0, nullptr);
  const Eigen::MatrixXd d_in = kl_logit_grad(
      cache_in.logits(),
      [&](Eigen::Index i) {
        const int y = y_in[static_cast<std::size_t>(i)];
        return DirichletParams::make(y == 0 ? config_.alpha_in_target : config_.alpha_out_target,
                                     y == 1 ? config_.alpha_in_target : config_.alpha_out_target);
      },
      1.0 / static_cast<double>(X_in.rows()));
  detail::Grads grads = net_.backward(cache_in, d_in, false);

  if (config_.lambda_weight > 0.0 && X_ood.rows() > 0) {
    const DirichletParams ood_target =
        DirichletParams::make(config_.alpha_out_target, config_.alpha_out_target);
    const detail::ForwardCache cache_ood = net_.forward(X_ood, 0.0, nullptr);
    const Eigen::MatrixXd d_ood =
        kl_logit_grad(cache_ood.logits(), [&](Eigen::Index) { return ood_target; },
                      config_.lambda_weight / static_cast<double>(X_ood.rows()));
    const detail::Grads grads_ood = net_.backward(cache_ood, d_ood, false);
    for (std::size_t l = 0; l < grads.dW.size(); ++l) {
      grads.dW[l] += grads_ood.dW[l];
      grads.db[l] += grads_ood.db[l];
    }
  }
  return detail::FeedForward::flatten_grads(grads);
}

void PriorNetModel::fit(const Eigen::MatrixXd& X_in, const std::vector<int>& y_in,
                        const Eigen::MatrixXd& X_ood) {
  validate_sets(X_in, y_in, X_ood, config_.lambda_weight);
  // Full-batch Adam. The reverse-KL gradients span orders of magnitude
  // (trigamma explodes near the softplus floor, and the pull toward the flat
  // OOD target is orders weaker than the pull toward the sharp in-domain
  // target); plain gradient descent stalls on the OOD term.
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  std::vector<double> theta = parameters();
  std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0);
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    const std::vector<double> grad = loss_gradient(X_in, y_in, X_ood);
    const double t = epoch + 1.0;
    const double correction =
        std::sqrt(1.0 - std::pow(kBeta2, t)) / (1.0 - std::pow(kBeta1, t));
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * grad[k];
      v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
      theta[k] -= config_.learning_rate * correction * m[k] / (std::sqrt(v[k]) + kAdamEps);
    }
    set_parameters(theta);
  }
}

PriorNetModel train_priornet(const LabeledDataset& in_data, const Eigen::MatrixXd& ood_features,
                             const PriorNetConfig& config) {
  auto [X, y] = detail::training_rows(in_data);
  if (X.rows() == 0) throw std::invalid_argument("train_priornet: empty in-domain data");
  PriorNetModel model(static_cast<int>(X.cols()), config);
  model.fit(X, y, ood_features);
  return model;
}

DirichletParams priornet_alphas(const PriorNetModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.input_dim())
    throw std::invalid_argument("priornet_alphas: input has dimension " +
                                std::to_string(x.size()) + ", model expects " +
                                std::to_string(model.input_dim()));
  return model.alphas(x);
}

}  // namespace uq
