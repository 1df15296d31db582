#include "uq/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uq {

std::string to_string(NcmKind kind) {
  switch (kind) {
    case NcmKind::NegPredictedProbability: return "neg_predicted_probability";
    case NcmKind::ExpectedEntropy: return "expected_entropy";
    case NcmKind::EntropyOfExpected: return "entropy_of_expected";
    case NcmKind::KnowledgeUncertainty: return "knowledge_uncertainty";
  }
  throw std::logic_error("unreachable NcmKind");
}

NcmKind ncm_kind_from_string(const std::string& name) {
  if (name == "neg_predicted_probability") return NcmKind::NegPredictedProbability;
  if (name == "expected_entropy") return NcmKind::ExpectedEntropy;
  if (name == "entropy_of_expected") return NcmKind::EntropyOfExpected;
  if (name == "knowledge_uncertainty") return NcmKind::KnowledgeUncertainty;
  throw std::invalid_argument("unknown NCM kind: " + name);
}

double ncm_score(NcmKind kind, const PredictionBundle& bundle) {
  if (bundle.predicted_label != 0 && bundle.predicted_label != 1)
    throw std::invalid_argument("ncm_score: predicted_label must be 0 or 1");
  if (kind == NcmKind::NegPredictedProbability)
    return -bundle.fused_probs[static_cast<std::size_t>(bundle.predicted_label)];
  if (!bundle.uncertainty.has_value())
    throw std::invalid_argument("ncm_score: " + to_string(kind) +
                                " requires an uncertainty triple");
  switch (kind) {
    case NcmKind::ExpectedEntropy: return bundle.uncertainty->expected_entropy;
    case NcmKind::EntropyOfExpected: return bundle.uncertainty->entropy_of_expected;
    case NcmKind::KnowledgeUncertainty: return bundle.uncertainty->knowledge_uncertainty;
    default: throw std::logic_error("unreachable");
  }
}

CalibrationScores build_calibration(const std::vector<PredictionBundle>& bundles,
                                    const std::vector<int>& true_labels, NcmKind kind) {
  if (bundles.size() != true_labels.size())
    throw std::invalid_argument("build_calibration: bundles and labels differ in length");
  CalibrationScores calib;
  calib.kind = kind;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const int y = true_labels[i];
    if (y != 0 && y != 1)
      throw std::invalid_argument("build_calibration: labels must be 0 or 1");
    calib.per_label[static_cast<std::size_t>(y)].push_back(ncm_score(kind, bundles[i]));
  }
  for (int y = 0; y < kNumClasses; ++y) {
    if (calib.per_label[static_cast<std::size_t>(y)].empty())
      throw std::invalid_argument("build_calibration: no calibration examples for class " +
                                  std::to_string(y));
    std::sort(calib.per_label[static_cast<std::size_t>(y)].begin(),
              calib.per_label[static_cast<std::size_t>(y)].end());
  }
  return calib;
}

double p_value(const CalibrationScores& calib, int predicted_label, double alpha_z,
               PValueMode mode) {
  if (predicted_label != 0 && predicted_label != 1)
    throw std::invalid_argument("p_value: predicted_label must be 0 or 1");
  const auto& scores = calib.per_label[static_cast<std::size_t>(predicted_label)];
  if (scores.empty()) throw std::invalid_argument("p_value: empty calibration group");
  const auto first_ge = std::lower_bound(scores.begin(), scores.end(), alpha_z);
  const auto count = static_cast<double>(scores.end() - first_ge);
  const auto n = static_cast<double>(scores.size());
  if (mode == PValueMode::Smoothed) return (count + 1.0) / (n + 1.0);
  return count / n;
}

bool ice_decide(double p_z, double tau) {
  if (!(p_z >= 0.0 && p_z <= 1.0)) throw std::invalid_argument("ice_decide: p-value not in [0,1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("ice_decide: tau not in [0,1]");
  return p_z >= tau;
}

nlohmann::json calibration_scores_to_json(const CalibrationScores& calib,
                                          const std::string& split_id) {
  return {{"schema", "conformal-v1"},
          {"ncm", to_string(calib.kind)},
          {"split", split_id},
          {"label0", calib.per_label[0]},
          {"label1", calib.per_label[1]}};
}

CalibrationScores calibration_scores_from_json(const nlohmann::json& j) {
  CalibrationScores calib;
  calib.kind = ncm_kind_from_string(j.at("ncm").get<std::string>());
  calib.per_label[0] = j.at("label0").get<std::vector<double>>();
  calib.per_label[1] = j.at("label1").get<std::vector<double>>();
  for (auto& v : calib.per_label) {
    if (v.empty()) throw std::invalid_argument("calibration_scores_from_json: empty class group");
    if (!std::is_sorted(v.begin(), v.end()))
      throw std::invalid_argument("calibration_scores_from_json: scores not sorted");
  }
  return calib;
}

}  // namespace uq
