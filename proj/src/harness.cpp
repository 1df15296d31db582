#include "uq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <stdexcept>

#include "uq/detail/format.hpp"

#include "uq/calibration.hpp"
#include "uq/models/attack.hpp"
#include "uq/models/ensemble.hpp"
#include "uq/models/fusion.hpp"
#include "uq/models/serialize.hpp"
#include "uq/models/stumps.hpp"
#include "uq/numerics.hpp"
#include "uq/uncertainty.hpp"

namespace uq {

std::string to_string(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::ProbThreshold: return "prob_threshold";
    case Pipeline::UncertaintyThreshold: return "uncertainty_threshold";
    case Pipeline::IceProbNcm: return "ice_prob_ncm";
    case Pipeline::IceUncertaintyNcm: return "ice_uncertainty_ncm";
  }
  throw std::logic_error("unreachable pipeline");
}

Pipeline pipeline_from_string(const std::string& name) {
  if (name == "prob_threshold") return Pipeline::ProbThreshold;
  if (name == "uncertainty_threshold") return Pipeline::UncertaintyThreshold;
  if (name == "ice_prob_ncm") return Pipeline::IceProbNcm;
  if (name == "ice_uncertainty_ncm") return Pipeline::IceUncertaintyNcm;
  throw std::invalid_argument("unknown pipeline: " + name);
}

namespace {

bool is_uncertainty_ncm(NcmKind kind) { return kind != NcmKind::NegPredictedProbability; }

bool shift_active(const ShiftSpec& shift) {
  return shift.kind != ShiftSpec::Kind::None && shift.strength > 0.0;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (!(fusion_weight >= 0.0 && fusion_weight <= 1.0))
    throw std::invalid_argument("ExperimentSpec: fusion_weight must lie in [0, 1]");
  if (!base_models.stumps && !base_models.mlp && !base_models.ensemble && !base_models.priornet)
    throw std::invalid_argument("ExperimentSpec: no base models selected");
  if (pipeline == Pipeline::IceUncertaintyNcm) {
    if (!base_models.ensemble)
      throw std::invalid_argument(
          "ExperimentSpec: ice_uncertainty_ncm requires the ensemble base model");
    if (!ncm || !is_uncertainty_ncm(*ncm))
      throw std::invalid_argument(
          "ExperimentSpec: ice_uncertainty_ncm requires an uncertainty NCM kind");
  }
  if (pipeline == Pipeline::UncertaintyThreshold) {
    if (!base_models.ensemble && !base_models.priornet)
      throw std::invalid_argument(
          "ExperimentSpec: uncertainty_threshold requires an ensemble or a PriorNet");
    if (!ncm || !is_uncertainty_ncm(*ncm))
      throw std::invalid_argument(
          "ExperimentSpec: uncertainty_threshold requires an uncertainty NCM kind");
  }
  if (models.ensemble_members < 1)
    throw std::invalid_argument("ExperimentSpec: ensemble_members must be >= 1");
  if (data.features_path.empty()) {
    if (data.n < 10 || data.d < 2)
      throw std::invalid_argument("ExperimentSpec: synthetic data needs n >= 10 and d >= 2");
  }
}

ClassifierMetrics classifier_metrics(const std::vector<int>& predicted,
                                     const std::vector<int>& true_labels) {
  if (predicted.size() != true_labels.size())
    throw std::invalid_argument("classifier_metrics: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("classifier_metrics: empty input");
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == 1 && true_labels[i] == 1) ++tp;
    if (predicted[i] == 0 && true_labels[i] == 0) ++tn;
    if (predicted[i] == 1 && true_labels[i] == 0) ++fp;
    if (predicted[i] == 0 && true_labels[i] == 1) ++fn;
  }
  ClassifierMetrics m;
  m.accuracy = 100.0 * (tp + tn) / static_cast<double>(predicted.size());
  if (tp + fp > 0)
    m.precision = 100.0 * tp / (tp + fp);
  else
    m.degenerate_precision = true;
  if (tp + fn > 0)
    m.recall = 100.0 * tp / (tp + fn);
  else
    m.degenerate_recall = true;
  if (m.precision + m.recall > 0)
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

namespace {

// Per-row model outputs for one split, before and after calibration.
struct SplitSignals {
  std::vector<double> stump_score;
  std::vector<std::array<double, 2>> mlp_logits;
  std::vector<std::vector<std::array<double, 2>>> member_logits;
  std::vector<std::array<double, 2>> mean_logits;  // ensemble mean
  std::vector<std::array<double, 2>> priornet_logits;
  std::vector<int> labels;
  std::size_t size = 0;
};

struct TrainedModels {
  std::optional<StumpEnsembleModel> stumps;
  std::optional<MlpModel> mlp;
  std::optional<EnsembleModel> ensemble;
  std::optional<PriorNetModel> priornet;
};

struct CalibrationArtifacts {
  std::optional<IsotonicMap> isotonic;
  std::optional<Temperature> temp_mlp;
  std::optional<Temperature> temp_ensemble;
  std::optional<Temperature> temp_priornet;
};

DirichletParams priornet_alphas_from_logits(const std::array<double, 2>& z) {
  const auto softplus = [](double v) {
    if (v > 30.0) return v;
    if (v < -30.0) return std::exp(v);
    return std::log1p(std::exp(v));
  };
  return DirichletParams::make(softplus(z[0]) + 1e-6, softplus(z[1]) + 1e-6);
}

SplitSignals collect_signals(const TrainedModels& models, const Eigen::MatrixXd& raw,
                             const Eigen::MatrixXd& standardized, const std::vector<int>& labels) {
  SplitSignals s;
  s.size = static_cast<std::size_t>(raw.rows());
  s.labels = labels;
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    if (models.stumps)
      s.stump_score.push_back(stump_score(*models.stumps, raw.row(i).transpose()));
    const Eigen::VectorXd x = standardized.row(i).transpose();
    if (models.mlp) s.mlp_logits.push_back(models.mlp->logits1(x));
    if (models.ensemble) {
      s.member_logits.push_back(ensemble_member_logits(*models.ensemble, x));
      s.mean_logits.push_back(ensemble_mean_logits(*models.ensemble, x));
    }
    if (models.priornet) s.priornet_logits.push_back(models.priornet->logits1(x));
  }
  return s;
}

// Assembles fused probabilities and the uncertainty triple for one row.
PredictionBundle build_bundle(const ExperimentSpec& spec, const TrainedModels& models,
                              const CalibrationArtifacts& calib, const SplitSignals& s,
                              std::size_t i) {
  const Temperature identity{1.0, 0.01, 10.0};

  std::optional<ProbabilityPair> stump_probs;
  if (models.stumps) {
    double score = s.stump_score[i];
    if (calib.isotonic) score = apply_isotonic(*calib.isotonic, score);
    stump_probs = score_to_probability_pair(score);
  }

  std::optional<ProbabilityPair> neural_probs;
  std::optional<UncertaintyTriple> uncertainty;
  if (models.ensemble) {
    const Temperature t = calib.temp_ensemble.value_or(identity);
    std::vector<ProbabilityPair> member_probs;
    member_probs.reserve(s.member_logits[i].size());
    for (const auto& z : s.member_logits[i]) member_probs.push_back(apply_temperature(z, t));
    const EnsembleOutput out = make_ensemble_output(std::move(member_probs));
    neural_probs = out.mean_probs;
    uncertainty = ensemble_uncertainty(out);
  } else if (models.mlp) {
    neural_probs = apply_temperature(s.mlp_logits[i], calib.temp_mlp.value_or(identity));
  }

  std::optional<DirichletParams> alphas;
  if (models.priornet) {
    std::array<double, 2> z = s.priornet_logits[i];
    if (calib.temp_priornet) {
      z[0] /= calib.temp_priornet->t;
      z[1] /= calib.temp_priornet->t;
    }
    alphas = priornet_alphas_from_logits(z);
    if (!neural_probs) neural_probs = dirichlet_probabilities(*alphas);
    if (!uncertainty) uncertainty = dirichlet_uncertainty(*alphas);
  }

  ProbabilityPair fused;
  if (neural_probs && stump_probs)
    fused = fuse(*neural_probs, *stump_probs, spec.fusion_weight);
  else if (neural_probs)
    fused = *neural_probs;
  else
    fused = *stump_probs;
  return PredictionBundle::make(fused, uncertainty);
}

std::vector<PredictionBundle> build_bundles(const ExperimentSpec& spec,
                                            const TrainedModels& models,
                                            const CalibrationArtifacts& calib,
                                            const SplitSignals& s) {
  std::vector<PredictionBundle> bundles;
  bundles.reserve(s.size);
  for (std::size_t i = 0; i < s.size; ++i)
    bundles.push_back(build_bundle(spec, models, calib, s, i));
  return bundles;
}

struct PipelineScores {
  std::vector<double> calib;
  std::vector<double> test;
  ThresholdKind kind = ThresholdKind::ScoreAtLeast;
  double fallback_theta = 0.5;
};

PipelineScores pipeline_scores(const ExperimentSpec& spec,
                               const std::vector<PredictionBundle>& calib_bundles,
                               const std::vector<int>& calib_labels,
                               const std::vector<PredictionBundle>& test_bundles) {
  PipelineScores out;
  switch (spec.pipeline) {
    case Pipeline::ProbThreshold: {
      out.kind = ThresholdKind::ScoreAtLeast;
      out.fallback_theta = 0.5;
      const auto confidence = [](const PredictionBundle& b) {
        return b.fused_probs[static_cast<std::size_t>(b.predicted_label)];
      };
      for (const auto& b : calib_bundles) out.calib.push_back(confidence(b));
      for (const auto& b : test_bundles) out.test.push_back(confidence(b));
      return out;
    }
    case Pipeline::UncertaintyThreshold: {
      out.kind = ThresholdKind::ScoreAtMost;
      for (const auto& b : calib_bundles) out.calib.push_back(ncm_score(*spec.ncm, b));
      for (const auto& b : test_bundles) out.test.push_back(ncm_score(*spec.ncm, b));
      // accept-everything fallback for a degenerate calibration split
      out.fallback_theta = *std::max_element(out.calib.begin(), out.calib.end());
      return out;
    }
    case Pipeline::IceProbNcm:
    case Pipeline::IceUncertaintyNcm: {
      out.kind = ThresholdKind::ScoreAtLeast;
      out.fallback_theta = 0.1;  // fixed tau convention
      const NcmKind kind = spec.pipeline == Pipeline::IceProbNcm
                               ? NcmKind::NegPredictedProbability
                               : *spec.ncm;
      const CalibrationScores scores = build_calibration(calib_bundles, calib_labels, kind);
      const PValueMode mode =
          spec.smoothed_pvalues ? PValueMode::Smoothed : PValueMode::Exact;
      const auto pv = [&](const PredictionBundle& b) {
        return p_value(scores, b.predicted_label, ncm_score(kind, b), mode);
      };
      for (const auto& b : calib_bundles) out.calib.push_back(pv(b));
      for (const auto& b : test_bundles) out.test.push_back(pv(b));
      return out;
    }
  }
  throw std::logic_error("unreachable pipeline");
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  // data: generate or load, split, shift the test rows, standardize
  LabeledDataset raw = spec.data.features_path.empty()
                           ? generate_synthetic(spec.data.n, spec.data.d, spec.data.class_sep,
                                                spec.data.seed)
                           : load_features(spec.data.features_path, spec.data.format);
  raw = assign_splits(raw, spec.split_fractions, spec.split_seed);
  raw = apply_shift(raw, spec.shift);
  const LabeledDataset std_ds = standardize(raw);

  // train the selected base models; neural models consume standardized rows
  TrainedModels models;
  if (spec.base_models.stumps)
    models.stumps = train_stumps(raw, spec.models.stump_rounds, spec.models.stump_learning_rate);
  if (spec.base_models.mlp) models.mlp = train_mlp(std_ds, spec.models.mlp);
  if (spec.base_models.ensemble)
    models.ensemble = train_ensemble(std_ds, spec.models.mlp, spec.models.ensemble_members,
                                     spec.models.ensemble_base_seed);
  if (spec.base_models.priornet) {
    // adversarial OOD set from an MLP trained on the same split
    const MlpModel* attack_source = nullptr;
    std::optional<MlpModel> aux;
    if (models.mlp) {
      attack_source = &*models.mlp;
    } else if (models.ensemble) {
      attack_source = &models.ensemble->members.front();
    } else {
      MlpConfig aux_config = spec.models.mlp;
      aux_config.seed = spec.models.priornet.seed + 1;
      aux = train_mlp(std_ds, aux_config);
      attack_source = &*aux;
    }
    const Eigen::MatrixXd ood = cw_generate_ood(
        *attack_source, std_ds.features_of(Split::Train), spec.models.cw_c, spec.models.cw_steps,
        spec.models.cw_step_size, spec.models.cw_max_points, spec.models.priornet.seed);
    models.priornet = train_priornet(std_ds, ood, spec.models.priornet);
  }

  const SplitSignals calib_signals =
      collect_signals(models, raw.features_of(Split::Calibration),
                      std_ds.features_of(Split::Calibration), raw.labels_of(Split::Calibration));
  const SplitSignals test_signals =
      collect_signals(models, raw.features_of(Split::Test), std_ds.features_of(Split::Test),
                      raw.labels_of(Split::Test));

  // probability calibration on the calibration split
  CalibrationArtifacts calib;
  if (spec.calibrated) {
    if (models.stumps) calib.isotonic = fit_isotonic(calib_signals.stump_score, calib_signals.labels);
    if (models.mlp) calib.temp_mlp = fit_temperature(calib_signals.mlp_logits, calib_signals.labels);
    if (models.ensemble)
      calib.temp_ensemble = fit_temperature(calib_signals.mean_logits, calib_signals.labels);
    if (models.priornet)
      calib.temp_priornet = fit_temperature(calib_signals.priornet_logits, calib_signals.labels);
  }

  const std::vector<PredictionBundle> calib_bundles =
      build_bundles(spec, models, calib, calib_signals);
  const std::vector<PredictionBundle> test_bundles =
      build_bundles(spec, models, calib, test_signals);

  std::vector<int> calib_predicted, test_predicted;
  for (const auto& b : calib_bundles) calib_predicted.push_back(b.predicted_label);
  for (const auto& b : test_bundles) test_predicted.push_back(b.predicted_label);

  const PipelineScores scores =
      pipeline_scores(spec, calib_bundles, calib_signals.labels, test_bundles);

  // threshold from the calibration split; fixed fallback when it has no
  // errors (or no correct predictions) at all
  ExperimentReport report;
  report.threshold_kind = scores.kind;
  try {
    const ThresholdResult best =
        optimize_threshold(scores.calib, scores.kind, calib_predicted, calib_signals.labels);
    report.chosen_theta = best.theta;
  } catch (const std::invalid_argument&) {
    report.chosen_theta = scores.fallback_theta;
    report.threshold_fallback = true;
    std::cerr << "[harness] degenerate calibration split; falling back to fixed threshold "
              << report.chosen_theta << '\n';
  }
  if (!report.threshold_fallback)
    report.sweep = sweep_thresholds(scores.calib, scores.kind, calib_predicted,
                                    calib_signals.labels);

  report.quad =
      tally(scores.test, scores.kind, report.chosen_theta, test_predicted, test_signals.labels);
  report.rate = rates(report.quad);
  for (int cls = 0; cls < kNumClasses; ++cls) {
    std::vector<double> cls_scores;
    std::vector<int> cls_pred, cls_true;
    for (std::size_t i = 0; i < scores.test.size(); ++i) {
      if (test_signals.labels[i] != cls) continue;
      cls_scores.push_back(scores.test[i]);
      cls_pred.push_back(test_predicted[i]);
      cls_true.push_back(test_signals.labels[i]);
    }
    if (!cls_scores.empty())
      report.per_class[static_cast<std::size_t>(cls)] =
          tally(cls_scores, scores.kind, report.chosen_theta, cls_pred, cls_true);
  }

  report.metrics_all = classifier_metrics(test_predicted, test_signals.labels);
  report.metrics_calibration = classifier_metrics(calib_predicted, calib_signals.labels);
  std::vector<int> acc_pred, acc_true;
  for (std::size_t i = 0; i < scores.test.size(); ++i) {
    const bool accepted = scores.kind == ThresholdKind::ScoreAtLeast
                              ? scores.test[i] >= report.chosen_theta
                              : scores.test[i] <= report.chosen_theta;
    if (accepted) {
      acc_pred.push_back(test_predicted[i]);
      acc_true.push_back(test_signals.labels[i]);
    }
  }
  report.metrics_accepted =
      acc_pred.empty() ? ClassifierMetrics{} : classifier_metrics(acc_pred, acc_true);

  report.calibration_split_reuse =
      spec.calibrated || spec.pipeline == Pipeline::IceProbNcm ||
      spec.pipeline == Pipeline::IceUncertaintyNcm;
  report.provenance = spec_to_json(spec);
  return report;
}

MatrixResult run_matrix(const std::vector<std::pair<std::string, ExperimentSpec>>& specs) {
  if (specs.empty()) throw std::invalid_argument("run_matrix: no specs");
  MatrixResult result;
  result.entries.resize(specs.size());

  std::vector<std::future<void>> tasks;
  tasks.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    tasks.push_back(std::async(std::launch::async, [&specs, &result, i] {
      MatrixEntry& entry = result.entries[i];
      entry.name = specs[i].first;
      try {
        entry.report = run_experiment(specs[i].second);
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
    }));
  }
  for (auto& task : tasks) task.get();

  std::string csv =
      "name,pipeline,ncm,calibrated,shift_kind,shift_strength,accuracy,precision,recall,f1,"
      "theta,ca,cr,ir,ia,ca_pct,cr_pct,ia_pct,h,error\n";
  for (const MatrixEntry& entry : result.entries) {
    csv += entry.name;
    if (entry.report) {
      const ExperimentReport& r = *entry.report;
      const auto& prov = r.provenance;
      csv += ',' + prov.value("pipeline", "");
      csv += ',' + prov.value("ncm", "");
      csv += prov.value("calibrated", false) ? ",true" : ",false";
      csv += ',' + prov.at("shift").value("kind", "");
      csv += ',' + detail::format_double(prov.at("shift").value("strength", 0.0));
      for (double v : {r.metrics_all.accuracy, r.metrics_all.precision, r.metrics_all.recall,
                       r.metrics_all.f1, r.chosen_theta})
        csv += ',' + detail::format_double(v);
      csv += ',' + std::to_string(r.quad.ca) + ',' + std::to_string(r.quad.cr) + ',' +
             std::to_string(r.quad.ir) + ',' + std::to_string(r.quad.ia);
      for (double v : {r.rate.ca_pct, r.rate.cr_pct, r.rate.ia_pct})
        csv += ',' + detail::format_double(v);
      csv += ',' + detail::format_double(harmonic(r.rate.ca_pct, r.rate.cr_pct));
      csv += ",\n";
    } else {
      csv += ",,,,,,,,,,,,,,,,,,,\"" + entry.error + "\"\n";
    }
  }
  result.comparison_csv = std::move(csv);
  return result;
}

namespace {

nlohmann::json quad_to_json(const ConfusionQuad& q) {
  return {{"ca", q.ca}, {"cr", q.cr}, {"ir", q.ir}, {"ia", q.ia}};
}

nlohmann::json metrics_to_json(const ClassifierMetrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"degenerate_precision", m.degenerate_precision},
          {"degenerate_recall", m.degenerate_recall}};
}

}  // namespace

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const SweepPoint& pt : report.sweep)
    sweep.push_back({{"theta", pt.theta}, {"ca_pct", pt.ca_pct}, {"cr_pct", pt.cr_pct},
                     {"h", pt.h}});
  return {{"schema", "report-v1"},
          {"classifier_metrics", metrics_to_json(report.metrics_all)},
          {"accepted_metrics", metrics_to_json(report.metrics_accepted)},
          {"calibration_metrics", metrics_to_json(report.metrics_calibration)},
          {"quad", quad_to_json(report.quad)},
          {"rates",
           {{"ca_pct", report.rate.ca_pct},
            {"cr_pct", report.rate.cr_pct},
            {"ir_pct", report.rate.ir_pct},
            {"ia_pct", report.rate.ia_pct},
            {"degenerate_correct", report.rate.degenerate_correct},
            {"degenerate_incorrect", report.rate.degenerate_incorrect}}},
          {"per_class",
           {{"benign", quad_to_json(report.per_class[0])},
            {"malware", quad_to_json(report.per_class[1])}}},
          {"chosen_theta", report.chosen_theta},
          {"threshold_kind",
           report.threshold_kind == ThresholdKind::ScoreAtLeast ? "score_at_least"
                                                                : "score_at_most"},
          {"threshold_fallback", report.threshold_fallback},
          {"calibration_split_reuse", report.calibration_split_reuse},
          {"h", harmonic(report.rate.ca_pct, report.rate.cr_pct)},
          {"sweep", sweep},
          {"provenance", report.provenance}};
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  std::vector<std::string> base;
  if (spec.base_models.stumps) base.emplace_back("stumps");
  if (spec.base_models.mlp) base.emplace_back("mlp");
  if (spec.base_models.ensemble) base.emplace_back("ensemble");
  if (spec.base_models.priornet) base.emplace_back("priornet");

  nlohmann::json data;
  if (spec.data.features_path.empty()) {
    data = {{"n", spec.data.n},
            {"d", spec.data.d},
            {"class_sep", spec.data.class_sep},
            {"seed", spec.data.seed}};
  } else {
    data = {{"path", spec.data.features_path},
            {"format", spec.data.format == FeatureFormat::Csv ? "csv" : "jsonl"}};
  }

  nlohmann::json j = {
      {"schema", "experiment-v1"},
      {"pipeline", to_string(spec.pipeline)},
      {"calibrated", spec.calibrated},
      {"base_models", base},
      {"fusion_weight", spec.fusion_weight},
      {"smoothed_pvalues", spec.smoothed_pvalues},
      {"shift",
       {{"kind", to_string(spec.shift.kind)},
        {"strength", spec.shift.strength},
        {"seed", spec.shift.seed}}},
      {"split", {{"fractions", spec.split_fractions}, {"seed", spec.split_seed}}},
      {"data", data},
      {"models",
       {{"mlp", mlp_config_to_json(spec.models.mlp)},
        {"ensemble",
         {{"members", spec.models.ensemble_members},
          {"base_seed", spec.models.ensemble_base_seed}}},
        {"priornet", priornet_config_to_json(spec.models.priornet)},
        {"stumps",
         {{"rounds", spec.models.stump_rounds},
          {"learning_rate", spec.models.stump_learning_rate}}},
        {"cw",
         {{"c", spec.models.cw_c},
          {"steps", spec.models.cw_steps},
          {"step_size", spec.models.cw_step_size},
          {"max_points", spec.models.cw_max_points}}}}}};
  if (spec.ncm) j["ncm"] = to_string(*spec.ncm);
  return j;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "experiment-v1")
    throw std::invalid_argument("spec_from_json: expected schema 'experiment-v1'");
  ExperimentSpec spec;
  spec.pipeline = pipeline_from_string(j.at("pipeline").get<std::string>());
  spec.calibrated = j.value("calibrated", true);

  if (j.contains("base_models")) {
    spec.base_models = BaseModels{false, false, false, false};
    for (const auto& name : j.at("base_models")) {
      const std::string model = name.get<std::string>();
      if (model == "stumps")
        spec.base_models.stumps = true;
      else if (model == "mlp")
        spec.base_models.mlp = true;
      else if (model == "ensemble")
        spec.base_models.ensemble = true;
      else if (model == "priornet")
        spec.base_models.priornet = true;
      else
        throw std::invalid_argument("spec_from_json: unknown base model '" + model + "'");
    }
  }

  if (j.contains("shift")) {
    const auto& shift = j.at("shift");
    spec.shift.kind = shift_kind_from_string(shift.value("kind", "none"));
    spec.shift.strength = shift.value("strength", 0.0);
    spec.shift.seed = shift.value("seed", std::uint64_t{0});
  }

  // fusion weight defaults follow the shift: 0.5 unshifted, 0.8 neural under shift
  spec.fusion_weight =
      j.contains("fusion_weight")
          ? j.at("fusion_weight").get<double>()
          : (shift_active(spec.shift) ? 0.8 : 0.5);

  if (j.contains("ncm")) spec.ncm = ncm_kind_from_string(j.at("ncm").get<std::string>());
  if (spec.pipeline == Pipeline::IceProbNcm) spec.ncm = NcmKind::NegPredictedProbability;
  spec.smoothed_pvalues = j.value("smoothed_pvalues", false);

  if (j.contains("split")) {
    const auto& split = j.at("split");
    if (split.contains("fractions")) {
      const auto f = split.at("fractions").get<std::vector<double>>();
      if (f.size() != 3)
        throw std::invalid_argument("spec_from_json: split.fractions needs 3 entries");
      spec.split_fractions = {f[0], f[1], f[2]};
    }
    spec.split_seed = split.value("seed", std::uint64_t{2});
  }

  if (j.contains("data")) {
    const auto& data = j.at("data");
    if (data.contains("path")) {
      spec.data.features_path = data.at("path").get<std::string>();
      spec.data.format =
          data.value("format", std::string("csv")) == "jsonl" ? FeatureFormat::Jsonl
                                                              : FeatureFormat::Csv;
    } else {
      spec.data.n = data.value("n", spec.data.n);
      spec.data.d = data.value("d", spec.data.d);
      spec.data.class_sep = data.value("class_sep", spec.data.class_sep);
      spec.data.seed = data.value("seed", spec.data.seed);
    }
  }

  if (j.contains("models")) {
    const auto& models = j.at("models");
    if (models.contains("mlp")) spec.models.mlp = mlp_config_from_json(models.at("mlp"));
    if (models.contains("priornet"))
      spec.models.priornet = priornet_config_from_json(models.at("priornet"));
    if (models.contains("ensemble")) {
      spec.models.ensemble_members = models.at("ensemble").value("members", 10);
      spec.models.ensemble_base_seed =
          models.at("ensemble").value("base_seed", std::uint64_t{100});
    }
    if (models.contains("stumps")) {
      spec.models.stump_rounds = models.at("stumps").value("rounds", 60);
      spec.models.stump_learning_rate = models.at("stumps").value("learning_rate", 0.2);
    }
    if (models.contains("cw")) {
      spec.models.cw_c = models.at("cw").value("c", 5.0);
      spec.models.cw_steps = models.at("cw").value("steps", 40);
      spec.models.cw_step_size = models.at("cw").value("step_size", 0.05);
      spec.models.cw_max_points = models.at("cw").value("max_points", 128);
    }
  }
  spec.validate();
  return spec;
}

void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_report: cannot open " + path);
  if (format == ReportFormat::Json)
    out << report_to_json(report).dump(2) << '\n';
  else
    out << sweep_to_csv(report.sweep);
  if (!out) throw std::runtime_error("emit_report: write failed for " + path);
}

}  // namespace uq
