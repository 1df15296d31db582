#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "uq/harness.hpp"

using uq::classifier_metrics;
using uq::ClassifierMetrics;
using uq::ExperimentReport;
using uq::ExperimentSpec;
using uq::NcmKind;
using uq::Pipeline;
using uq::run_experiment;

namespace {

// small models keep the suite fast; the acceptance binary runs the full sizes
ExperimentSpec fast_spec(Pipeline pipeline, std::uint64_t data_seed = 1) {
  ExperimentSpec spec;
  spec.pipeline = pipeline;
  spec.data.n = 900;
  spec.data.d = 4;
  spec.data.class_sep = 2.2;
  spec.data.seed = data_seed;
  spec.models.mlp.layer_sizes = {12, 8};
  spec.models.mlp.epochs = 80;
  spec.models.mlp.dropout_rate = 0.1;
  spec.models.ensemble_members = 4;
  spec.models.stump_rounds = 25;
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("classifier_metrics hand-counted cases") {
  const ClassifierMetrics perfect = classifier_metrics({1, 0, 1}, {1, 0, 1});
  CHECK(perfect.accuracy == doctest::Approx(100.0));
  CHECK(perfect.precision == doctest::Approx(100.0));
  CHECK(perfect.recall == doctest::Approx(100.0));
  CHECK(perfect.f1 == doctest::Approx(100.0));

  // TP=1 FP=1 FN=1 TN=1
  const ClassifierMetrics half = classifier_metrics({1, 1, 0, 0}, {1, 0, 1, 0});
  CHECK(half.accuracy == doctest::Approx(50.0));
  CHECK(half.precision == doctest::Approx(50.0));
  CHECK(half.recall == doctest::Approx(50.0));
  CHECK(half.f1 == doctest::Approx(50.0));

  const ClassifierMetrics none = classifier_metrics({0, 0}, {1, 1});
  CHECK(none.degenerate_precision);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  CHECK_THROWS_AS(classifier_metrics({1}, {1, 0}), std::invalid_argument);
}

TEST_CASE("run_experiment is reproducible bit for bit") {
  const ExperimentSpec spec = fast_spec(Pipeline::ProbThreshold);
  const ExperimentReport a = run_experiment(spec);
  const ExperimentReport b = run_experiment(spec);
  CHECK(uq::report_to_json(a).dump() == uq::report_to_json(b).dump());
}

TEST_CASE("report quad covers the whole test split") {
  const ExperimentSpec spec = fast_spec(Pipeline::IceProbNcm);
  const ExperimentReport report = run_experiment(spec);
  const auto test_size = static_cast<std::int64_t>(std::floor(0.3 * spec.data.n));
  CHECK(report.quad.total() == test_size);
  CHECK(report.per_class[0].total() + report.per_class[1].total() == report.quad.total());
}

TEST_CASE("unshifted runs keep test F1 near calibration F1") {
  const ExperimentReport report = run_experiment(fast_spec(Pipeline::ProbThreshold, 3));
  CHECK(std::abs(report.metrics_all.f1 - report.metrics_calibration.f1) <= 2.0);
}

TEST_CASE("ICE acceptance rate tracks the p-value validity prediction per class") {
  ExperimentSpec spec = fast_spec(Pipeline::IceProbNcm, 5);
  spec.data.n = 4000;
  spec.data.class_sep = 3.0;
  const ExperimentReport report = run_experiment(spec);
  const double tau = report.chosen_theta;
  for (int cls = 0; cls < 2; ++cls) {
    const uq::ConfusionQuad& q = report.per_class[static_cast<std::size_t>(cls)];
    const double accept_rate =
        static_cast<double>(q.ca + q.ia) / static_cast<double>(q.total());
    // exchangeability: P(p >= tau) is 1 - tau up to the discrete grid
    CHECK(std::abs(accept_rate - (1.0 - tau)) <= 0.03);
  }
}

TEST_CASE("degenerate calibration split falls back to the fixed threshold") {
  ExperimentSpec spec = fast_spec(Pipeline::IceProbNcm, 7);
  spec.data.class_sep = 14.0;  // nothing is misclassified
  const ExperimentReport report = run_experiment(spec);
  CHECK(report.threshold_fallback);
  CHECK(report.chosen_theta == doctest::Approx(0.1));
  CHECK(report.sweep.empty());
}

TEST_CASE("uncertainty pipelines require their inputs") {
  ExperimentSpec spec = fast_spec(Pipeline::IceUncertaintyNcm);
  CHECK_THROWS_AS(run_experiment(spec), std::invalid_argument);  // no NCM kind set
  spec.ncm = NcmKind::ExpectedEntropy;
  spec.base_models.ensemble = false;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  ExperimentSpec unc = fast_spec(Pipeline::UncertaintyThreshold);
  unc.ncm = NcmKind::NegPredictedProbability;
  CHECK_THROWS_AS(unc.validate(), std::invalid_argument);
}

TEST_CASE("uncertainty threshold pipeline runs off the ensemble triple") {
  ExperimentSpec spec = fast_spec(Pipeline::UncertaintyThreshold, 9);
  spec.ncm = NcmKind::KnowledgeUncertainty;
  const ExperimentReport report = run_experiment(spec);
  CHECK(report.threshold_kind == uq::ThresholdKind::ScoreAtMost);
  CHECK(report.quad.total() > 0);
}

TEST_CASE("priornet-only uncertainty threshold pipeline") {
  ExperimentSpec spec = fast_spec(Pipeline::UncertaintyThreshold, 11);
  spec.base_models = uq::BaseModels{true, false, false, true};  // stumps + priornet
  spec.ncm = NcmKind::EntropyOfExpected;
  spec.models.priornet.layer_sizes = {12, 8};
  spec.models.priornet.epochs = 60;
  spec.models.cw_steps = 15;
  spec.models.cw_max_points = 48;
  const ExperimentReport report = run_experiment(spec);
  CHECK(report.quad.total() > 0);
}

TEST_CASE("spec JSON round trip preserves every field") {
  ExperimentSpec spec = fast_spec(Pipeline::IceUncertaintyNcm, 13);
  spec.ncm = NcmKind::EntropyOfExpected;
  spec.calibrated = false;
  spec.fusion_weight = 0.8;
  spec.shift = uq::ShiftSpec{uq::ShiftSpec::Kind::AffinePacking, 1.5, 77};
  spec.smoothed_pvalues = true;
  const ExperimentSpec back = uq::spec_from_json(uq::spec_to_json(spec));
  CHECK(uq::spec_to_json(back).dump() == uq::spec_to_json(spec).dump());
}

TEST_CASE("spec JSON fusion weight defaults follow the shift") {
  nlohmann::json j = {{"schema", "experiment-v1"}, {"pipeline", "prob_threshold"}};
  CHECK(uq::spec_from_json(j).fusion_weight == doctest::Approx(0.5));
  j["shift"] = {{"kind", "affine_packing"}, {"strength", 2.0}, {"seed", 1}};
  CHECK(uq::spec_from_json(j).fusion_weight == doctest::Approx(0.8));
}

TEST_CASE("emit_report writes byte-identical files and the exact CSV header") {
  const ExperimentReport report = run_experiment(fast_spec(Pipeline::ProbThreshold, 17));
  uq::emit_report(report, uq::ReportFormat::Json, "uq_test_report_a.json");
  uq::emit_report(report, uq::ReportFormat::Json, "uq_test_report_b.json");
  CHECK(slurp("uq_test_report_a.json") == slurp("uq_test_report_b.json"));

  uq::emit_report(report, uq::ReportFormat::Csv, "uq_test_curve.csv");
  const std::string csv = slurp("uq_test_curve.csv");
  CHECK(csv.rfind("theta,ca_pct,cr_pct,h\n", 0) == 0);

  // round trip through JSON keeps the structure
  const nlohmann::json parsed = nlohmann::json::parse(slurp("uq_test_report_a.json"));
  CHECK(parsed.at("schema") == "report-v1");
  CHECK(parsed.at("quad").at("ca").get<std::int64_t>() == report.quad.ca);
  CHECK(parsed.at("sweep").size() == report.sweep.size());

  std::remove("uq_test_report_a.json");
  std::remove("uq_test_report_b.json");
  std::remove("uq_test_curve.csv");
}

TEST_CASE("run_matrix isolates failures and reports every spec") {
  ExperimentSpec good = fast_spec(Pipeline::ProbThreshold, 19);
  ExperimentSpec bad = fast_spec(Pipeline::ProbThreshold, 19);
  bad.data.features_path = "does_not_exist.csv";

  const uq::MatrixResult result = uq::run_matrix(
      {{"good", good}, {"bad", bad}, {"good_again", good}});
  REQUIRE(result.entries.size() == 3);
  CHECK(result.entries[0].report.has_value());
  CHECK_FALSE(result.entries[1].report.has_value());
  CHECK_FALSE(result.entries[1].error.empty());
  CHECK(result.entries[2].report.has_value());

  // identical specs give identical reports
  CHECK(uq::report_to_json(*result.entries[0].report).dump() ==
        uq::report_to_json(*result.entries[2].report).dump());

  // header plus one row per entry
  std::size_t lines = 0;
  for (char c : result.comparison_csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 4);
}

TEST_CASE("pipeline name round trip") {
  for (Pipeline p : {Pipeline::ProbThreshold, Pipeline::UncertaintyThreshold,
                     Pipeline::IceProbNcm, Pipeline::IceUncertaintyNcm})
    CHECK(uq::pipeline_from_string(uq::to_string(p)) == p);
  CHECK_THROWS_AS(uq::pipeline_from_string("nope"), std::invalid_argument);
}
