#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uq/types.hpp"
#include "uq/uncertainty.hpp"

#include "json.hpp"

namespace uq {

/// Nonconformity measures. Higher score = more nonconforming for every kind.
enum class NcmKind {
  NegPredictedProbability,  // -p[predicted]; the probability-as-NCM baseline
  ExpectedEntropy,
  EntropyOfExpected,
  KnowledgeUncertainty,
};

std::string to_string(NcmKind kind);
NcmKind ncm_kind_from_string(const std::string& name);

/// One prediction as seen by the conformal layer. predicted_label must be the
/// argmax of fused_probs; uncertainty is required by the uncertainty NCMs.
struct PredictionBundle {
  ProbabilityPair fused_probs;
  int predicted_label = 0;
  std::optional<UncertaintyTriple> uncertainty;

  static PredictionBundle make(ProbabilityPair probs,
                               std::optional<UncertaintyTriple> unc = std::nullopt) {
    if (!probs.is_valid())
      throw std::invalid_argument("PredictionBundle: fused_probs is not a distribution");
    return PredictionBundle{probs, probs.predicted_label(), unc};
  }
};

/// Label-conditional calibration scores: one ascending-sorted sequence per
/// true class, built from the calibration split only.
struct CalibrationScores {
  NcmKind kind = NcmKind::NegPredictedProbability;
  std::array<std::vector<double>, 2> per_label;
};

enum class PValueMode {
  Exact,     // |{a in S : a >= a_z}| / |S|
  Smoothed,  // (count + 1) / (|S| + 1); never zero
};

/// Nonconformity score of a bundle under the given measure.
double ncm_score(NcmKind kind, const PredictionBundle& bundle);

/// Groups calibration scores by the examples' true labels and sorts each
/// group. A class with no calibration examples is an error.
CalibrationScores build_calibration(const std::vector<PredictionBundle>& bundles,
                                    const std::vector<int>& true_labels, NcmKind kind);

/// Fraction of same-class calibration scores at least as nonconforming as
/// alpha_z.
double p_value(const CalibrationScores& calib, int predicted_label, double alpha_z,
               PValueMode mode = PValueMode::Exact);

/// Accept iff p_z >= tau.
bool ice_decide(double p_z, double tau);

nlohmann::json calibration_scores_to_json(const CalibrationScores& calib,
                                          const std::string& split_id);
CalibrationScores calibration_scores_from_json(const nlohmann::json& j);

}  // namespace uq
