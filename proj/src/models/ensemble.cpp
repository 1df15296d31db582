#include "uq/models/ensemble.hpp"

#include <stdexcept>

namespace uq {

EnsembleModel train_ensemble(const LabeledDataset& data, const MlpConfig& config, int m,
                             std::uint64_t base_seed) {
  if (m < 1) throw std::invalid_argument("train_ensemble: need m >= 1 members");
  EnsembleModel ensemble;
  ensemble.members.reserve(static_cast<std::size_t>(m));
  ensemble.member_seeds.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    MlpConfig member_config = config;
    member_config.seed = base_seed + static_cast<std::uint64_t>(i);
    ensemble.members.push_back(train_mlp(data, member_config));
    ensemble.member_seeds.push_back(member_config.seed);
  }
  return ensemble;
}

EnsembleOutput ensemble_predict(const EnsembleModel& ensemble, const Eigen::VectorXd& x) {
  if (ensemble.members.empty()) throw std::invalid_argument("ensemble_predict: empty ensemble");
  std::vector<ProbabilityPair> member_probs;
  member_probs.reserve(ensemble.size());
  for (const MlpModel& member : ensemble.members)
    member_probs.push_back(predict_proba(member, x).probs);
  return make_ensemble_output(std::move(member_probs));
}

std::vector<std::array<double, 2>> ensemble_member_logits(const EnsembleModel& ensemble,
                                                          const Eigen::VectorXd& x) {
  if (ensemble.members.empty())
    throw std::invalid_argument("ensemble_member_logits: empty ensemble");
  std::vector<std::array<double, 2>> out;
  out.reserve(ensemble.size());
  for (const MlpModel& member : ensemble.members) out.push_back(member.logits1(x));
  return out;
}

std::array<double, 2> ensemble_mean_logits(const EnsembleModel& ensemble,
                                           const Eigen::VectorXd& x) {
  const auto member = ensemble_member_logits(ensemble, x);
  std::vector<double> z0, z1;
  z0.reserve(member.size());
  z1.reserve(member.size());
  for (const auto& z : member) {
    z0.push_back(z[0]);
    z1.push_back(z[1]);
  }
  return {multiset_mean(std::move(z0)), multiset_mean(std::move(z1))};
}

}  // namespace uq
