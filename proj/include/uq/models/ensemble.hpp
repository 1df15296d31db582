#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "uq/models/mlp.hpp"
#include "uq/types.hpp"

namespace uq {

/// M independently seeded MLPs sharing one architecture.
struct EnsembleModel {
  std::vector<MlpModel> members;
  std::vector<std::uint64_t> member_seeds;

  std::size_t size() const { return members.size(); }
};

/// Trains m copies with seeds base_seed .. base_seed + m - 1.
EnsembleModel train_ensemble(const LabeledDataset& data, const MlpConfig& config, int m,
                             std::uint64_t base_seed);

/// Member probabilities plus their componentwise mean.
EnsembleOutput ensemble_predict(const EnsembleModel& ensemble, const Eigen::VectorXd& x);

/// Per-member pre-softmax logits, for temperature calibration.
std::vector<std::array<double, 2>> ensemble_member_logits(const EnsembleModel& ensemble,
                                                          const Eigen::VectorXd& x);

/// Componentwise mean of member logits (the shared-temperature fit target).
std::array<double, 2> ensemble_mean_logits(const EnsembleModel& ensemble,
                                           const Eigen::VectorXd& x);

}  // namespace uq
