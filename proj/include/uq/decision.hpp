#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace uq {

/// Accept/reject outcomes crossed with prediction correctness.
struct ConfusionQuad {
  std::int64_t ca = 0;  // correctly accepted
  std::int64_t cr = 0;  // correctly rejected
  std::int64_t ir = 0;  // incorrectly rejected
  std::int64_t ia = 0;  // incorrectly accepted

  std::int64_t correct() const { return ca + ir; }
  std::int64_t incorrect() const { return cr + ia; }
  std::int64_t total() const { return ca + cr + ir + ia; }
};

/// Direction of the accept rule. Probabilities and p-values accept high
/// scores; uncertainty estimates accept low ones.
enum class ThresholdKind {
  ScoreAtLeast,  // accept iff score >= theta
  ScoreAtMost,   // accept iff score <= theta
};

/// Percentage rates derived from a quad. Zero denominators yield 0 with the
/// matching degenerate flag set.
struct Rates {
  double ca_pct = 0.0;
  double cr_pct = 0.0;
  double ir_pct = 0.0;
  double ia_pct = 0.0;
  bool degenerate_correct = false;    // no correctly predicted instances
  bool degenerate_incorrect = false;  // no incorrectly predicted instances
};

struct ThresholdResult {
  double theta = 0.0;
  double h = 0.0;
  ConfusionQuad quad;
  double ca_pct = 0.0;
  double cr_pct = 0.0;
  double ir_pct = 0.0;
  double ia_pct = 0.0;
};

struct SweepPoint {
  double theta = 0.0;
  double ca_pct = 0.0;
  double cr_pct = 0.0;
  double h = 0.0;
};

/// Candidate thresholds for the exhaustive search. The default derives the
/// grid from the observed scores: sorted unique values, midpoints between
/// consecutive uniques, and sentinels beyond both extremes. That grid always
/// contains a maximizer of the piecewise-constant objective.
struct GridSpec {
  std::vector<double> points;  // empty = derive from scores

  static GridSpec from_scores() { return GridSpec{}; }
  static GridSpec explicit_points(std::vector<double> pts) { return GridSpec{std::move(pts)}; }

  std::vector<double> resolve(const std::vector<double>& scores) const;
};

/// Counts CA/CR/IR/IA for one threshold.
ConfusionQuad tally(const std::vector<double>& scores, ThresholdKind kind, double theta,
                    const std::vector<int>& predicted_labels, const std::vector<int>& true_labels);

Rates rates(const ConfusionQuad& quad);

/// 2ab / (a+b); zero when both rates vanish.
double harmonic(double ca_pct, double cr_pct);

/// Exhaustive search over the grid for the threshold maximizing the harmonic
/// mean of CA% and CR%. Ties prefer the threshold accepting the most
/// instances, then the smallest theta for ScoreAtLeast (largest for
/// ScoreAtMost). Requires at least one correct and one incorrect prediction.
ThresholdResult optimize_threshold(const std::vector<double>& scores, ThresholdKind kind,
                                   const std::vector<int>& predicted_labels,
                                   const std::vector<int>& true_labels,
                                   const GridSpec& grid = GridSpec::from_scores());

/// Full (theta, CA%, CR%, H) curve over the grid, in ascending theta order.
std::vector<SweepPoint> sweep_thresholds(const std::vector<double>& scores, ThresholdKind kind,
                                         const std::vector<int>& predicted_labels,
                                         const std::vector<int>& true_labels,
                                         const GridSpec& grid = GridSpec::from_scores());

/// Constrained alternative: maximize F1 of accepted predictions subject to a
/// rejection-rate cap. Returns the best feasible grid point; falls back to
/// the least-rejecting grid point if none is feasible.
ThresholdResult optimize_threshold_constrained(const std::vector<double>& scores,
                                               ThresholdKind kind,
                                               const std::vector<int>& predicted_labels,
                                               const std::vector<int>& true_labels,
                                               double max_rejection_rate,
                                               const GridSpec& grid = GridSpec::from_scores());

nlohmann::json threshold_result_to_json(const ThresholdResult& result);

/// CSV with header "theta,ca_pct,cr_pct,h", one row per sweep point.
std::string sweep_to_csv(const std::vector<SweepPoint>& sweep);

}  // namespace uq
