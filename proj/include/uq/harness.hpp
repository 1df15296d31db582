#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "uq/conformal.hpp"
#include "uq/dataset.hpp"
#include "uq/decision.hpp"
#include "uq/models/mlp.hpp"
#include "uq/models/priornet.hpp"

#include "json.hpp"

namespace uq {

enum class Pipeline {
  ProbThreshold,         // threshold on the fused predicted-class probability
  UncertaintyThreshold,  // threshold on an ensemble/Dirichlet uncertainty metric
  IceProbNcm,            // conformal p-values, probability NCM (the baseline)
  IceUncertaintyNcm,     // conformal p-values, ensemble-uncertainty NCM
};

std::string to_string(Pipeline pipeline);
Pipeline pipeline_from_string(const std::string& name);

struct BaseModels {
  bool stumps = true;
  bool mlp = false;
  bool ensemble = true;
  bool priornet = false;
};

/// Synthetic generation parameters, or a file to load instead.
struct DataSpec {
  int n = 2000;
  int d = 8;
  double class_sep = 2.5;
  std::uint64_t seed = 1;
  std::string features_path;  // when set, overrides the synthetic generator
  FeatureFormat format = FeatureFormat::Csv;
};

struct HarnessModelParams {
  MlpConfig mlp;
  int ensemble_members = 10;
  std::uint64_t ensemble_base_seed = 100;
  PriorNetConfig priornet;
  int stump_rounds = 60;
  double stump_learning_rate = 0.2;
  // C&W generation of the Dirichlet head's OOD set
  double cw_c = 5.0;
  int cw_steps = 40;
  double cw_step_size = 0.05;
  int cw_max_points = 128;
};

struct ExperimentSpec {
  Pipeline pipeline = Pipeline::ProbThreshold;
  bool calibrated = true;
  BaseModels base_models;
  double fusion_weight = 0.5;
  ShiftSpec shift;
  std::array<double, 3> split_fractions{0.6, 0.1, 0.3};
  std::uint64_t split_seed = 2;
  std::optional<NcmKind> ncm;
  bool smoothed_pvalues = false;
  DataSpec data;
  HarnessModelParams models;

  void validate() const;
};

struct ClassifierMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate_precision = false;  // no positive predictions
  bool degenerate_recall = false;     // no positive instances
};

/// Standard binary metrics in percent, malware (class 1) positive.
ClassifierMetrics classifier_metrics(const std::vector<int>& predicted,
                                     const std::vector<int>& true_labels);

struct ExperimentReport {
  ClassifierMetrics metrics_all;          // classifier quality on the full test split
  ClassifierMetrics metrics_accepted;     // same metrics on the accepted subset
  ClassifierMetrics metrics_calibration;  // classifier quality on the calibration split
  ConfusionQuad quad;
  Rates rate;
  std::array<ConfusionQuad, 2> per_class;  // keyed by true label
  double chosen_theta = 0.0;
  ThresholdKind threshold_kind = ThresholdKind::ScoreAtLeast;
  bool threshold_fallback = false;  // degenerate calibration split, fixed threshold used
  bool calibration_split_reuse = false;
  std::vector<SweepPoint> sweep;  // calibration-split curve the threshold came from
  nlohmann::json provenance;      // spec echo; reruns reproduce every number
};

ExperimentReport run_experiment(const ExperimentSpec& spec);

struct MatrixEntry {
  std::string name;
  std::optional<ExperimentReport> report;
  std::string error;  // set when the run failed
};

struct MatrixResult {
  std::vector<MatrixEntry> entries;
  std::string comparison_csv;
};

/// Independent runs; failures are isolated per entry and the matrix
/// continues. Entries execute concurrently.
MatrixResult run_matrix(const std::vector<std::pair<std::string, ExperimentSpec>>& specs);

nlohmann::json report_to_json(const ExperimentReport& report);
nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);

enum class ReportFormat { Json, Csv };

/// Json writes the full report; Csv writes the sweep curve
/// ("theta,ca_pct,cr_pct,h"). Emission is byte-stable.
void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& path);

}  // namespace uq
