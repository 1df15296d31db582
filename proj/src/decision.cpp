#include "uq/decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uq/detail/format.hpp"

namespace uq {

namespace {

void validate_inputs(const std::vector<double>& scores, const std::vector<int>& predicted,
                     const std::vector<int>& truth) {
  if (scores.size() != predicted.size() || scores.size() != truth.size())
    throw std::invalid_argument("decision: scores/predicted/true lengths differ");
  if (scores.empty()) throw std::invalid_argument("decision: empty input");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]))
      throw std::invalid_argument("decision: non-finite score at index " + std::to_string(i));
  }
}

bool accepts(ThresholdKind kind, double score, double theta) {
  return kind == ThresholdKind::ScoreAtLeast ? score >= theta : score <= theta;
}

}  // namespace

std::vector<double> GridSpec::resolve(const std::vector<double>& scores) const {
  if (!points.empty()) {
    std::vector<double> out = points;
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<double> uniq = scores;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<double> out;
  out.reserve(2 * uniq.size() + 2);
  out.push_back(uniq.front() - 1.0);
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    out.push_back(uniq[i]);
    if (i + 1 < uniq.size()) out.push_back(0.5 * (uniq[i] + uniq[i + 1]));
  }
  out.push_back(uniq.back() + 1.0);
  return out;
}

ConfusionQuad tally(const std::vector<double>& scores, ThresholdKind kind, double theta,
                    const std::vector<int>& predicted_labels,
                    const std::vector<int>& true_labels) {
  validate_inputs(scores, predicted_labels, true_labels);
  ConfusionQuad q;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool accepted = accepts(kind, scores[i], theta);
    const bool correct = predicted_labels[i] == true_labels[i];
    if (accepted)
      (correct ? q.ca : q.ia) += 1;
    else
      (correct ? q.ir : q.cr) += 1;
  }
  return q;
}

Rates rates(const ConfusionQuad& quad) {
  Rates r;
  const auto correct = static_cast<double>(quad.correct());
  const auto incorrect = static_cast<double>(quad.incorrect());
  if (correct > 0) {
    r.ca_pct = 100.0 * static_cast<double>(quad.ca) / correct;
    r.ir_pct = 100.0 * static_cast<double>(quad.ir) / correct;
  } else {
    r.degenerate_correct = true;
  }
  if (incorrect > 0) {
    r.cr_pct = 100.0 * static_cast<double>(quad.cr) / incorrect;
    r.ia_pct = 100.0 * static_cast<double>(quad.ia) / incorrect;
  } else {
    r.degenerate_incorrect = true;
  }
  return r;
}

double harmonic(double ca_pct, double cr_pct) {
  if (!(ca_pct >= 0.0 && ca_pct <= 100.0 && cr_pct >= 0.0 && cr_pct <= 100.0))
    throw std::invalid_argument("harmonic: rates must lie in [0, 100]");
  const double denom = ca_pct + cr_pct;
  if (denom <= 0.0) return 0.0;
  return 2.0 * ca_pct * cr_pct / denom;
}

ThresholdResult optimize_threshold(const std::vector<double>& scores, ThresholdKind kind,
                                   const std::vector<int>& predicted_labels,
                                   const std::vector<int>& true_labels, const GridSpec& grid) {
  validate_inputs(scores, predicted_labels, true_labels);
  std::int64_t n_correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    n_correct += predicted_labels[i] == true_labels[i] ? 1 : 0;
  if (n_correct == 0 || n_correct == static_cast<std::int64_t>(scores.size()))
    throw std::invalid_argument(
        "optimize_threshold: needs at least one correct and one incorrect prediction; "
        "H is degenerate otherwise (see the degenerate-rates convention)");

  const std::vector<double> thetas = grid.resolve(scores);
  bool have_best = false;
  ThresholdResult best;
  std::int64_t best_accepted = -1;
  for (double theta : thetas) {
    const ConfusionQuad q = tally(scores, kind, theta, predicted_labels, true_labels);
    const Rates r = rates(q);
    const double h = harmonic(r.ca_pct, r.cr_pct);
    const std::int64_t accepted = q.ca + q.ia;
    bool take = !have_best;
    if (have_best && h == best.h) {
      if (accepted > best_accepted)
        take = true;
      else if (accepted == best_accepted)
        take = kind == ThresholdKind::ScoreAtLeast ? theta < best.theta : theta > best.theta;
    } else if (have_best && h > best.h) {
      take = true;
    }
    if (take) {
      best = ThresholdResult{theta, h, q, r.ca_pct, r.cr_pct, r.ir_pct, r.ia_pct};
      best_accepted = accepted;
      have_best = true;
    }
  }
  return best;
}

std::vector<SweepPoint> sweep_thresholds(const std::vector<double>& scores, ThresholdKind kind,
                                         const std::vector<int>& predicted_labels,
                                         const std::vector<int>& true_labels,
                                         const GridSpec& grid) {
  validate_inputs(scores, predicted_labels, true_labels);
  const std::vector<double> thetas = grid.resolve(scores);
  std::vector<SweepPoint> curve;
  curve.reserve(thetas.size());
  for (double theta : thetas) {
    const ConfusionQuad q = tally(scores, kind, theta, predicted_labels, true_labels);
    const Rates r = rates(q);
    curve.push_back({theta, r.ca_pct, r.cr_pct, harmonic(r.ca_pct, r.cr_pct)});
  }
  return curve;
}

ThresholdResult optimize_threshold_constrained(const std::vector<double>& scores,
                                               ThresholdKind kind,
                                               const std::vector<int>& predicted_labels,
                                               const std::vector<int>& true_labels,
                                               double max_rejection_rate, const GridSpec& grid) {
  validate_inputs(scores, predicted_labels, true_labels);
  if (!(max_rejection_rate >= 0.0 && max_rejection_rate <= 1.0))
    throw std::invalid_argument("optimize_threshold_constrained: cap must lie in [0,1]");

  const auto accepted_f1 = [&](double theta) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!accepts(kind, scores[i], theta)) continue;
      if (predicted_labels[i] == 1 && true_labels[i] == 1) ++tp;
      if (predicted_labels[i] == 1 && true_labels[i] == 0) ++fp;
      if (predicted_labels[i] == 0 && true_labels[i] == 1) ++fn;
    }
    const double denom = 2.0 * tp + fp + fn;
    return denom > 0 ? 2.0 * tp / denom : 0.0;
  };

  const std::vector<double> thetas = grid.resolve(scores);
  const double n = static_cast<double>(scores.size());
  bool have_best = false, have_fallback = false;
  double best_f1 = -1.0, least_rejection = 2.0;
  double best_theta = 0.0, fallback_theta = 0.0;
  for (double theta : thetas) {
    const ConfusionQuad q = tally(scores, kind, theta, predicted_labels, true_labels);
    const double rejection = static_cast<double>(q.cr + q.ir) / n;
    if (!have_fallback || rejection < least_rejection) {
      least_rejection = rejection;
      fallback_theta = theta;
      have_fallback = true;
    }
    if (rejection <= max_rejection_rate) {
      const double f1 = accepted_f1(theta);
      if (!have_best || f1 > best_f1) {
        best_f1 = f1;
        best_theta = theta;
        have_best = true;
      }
    }
  }
  const double theta = have_best ? best_theta : fallback_theta;
  const ConfusionQuad q = tally(scores, kind, theta, predicted_labels, true_labels);
  const Rates r = rates(q);
  return ThresholdResult{theta, harmonic(r.ca_pct, r.cr_pct), q, r.ca_pct, r.cr_pct,
                         r.ir_pct, r.ia_pct};
}

nlohmann::json threshold_result_to_json(const ThresholdResult& result) {
  return {{"theta", result.theta},
          {"h", result.h},
          {"quad",
           {{"ca", result.quad.ca},
            {"cr", result.quad.cr},
            {"ir", result.quad.ir},
            {"ia", result.quad.ia}}},
          {"ca_pct", result.ca_pct},
          {"cr_pct", result.cr_pct},
          {"ir_pct", result.ir_pct},
          {"ia_pct", result.ia_pct}};
}

std::string sweep_to_csv(const std::vector<SweepPoint>& sweep) {
  std::string out = "theta,ca_pct,cr_pct,h\n";
  for (const SweepPoint& pt : sweep) {
    out += detail::format_double(pt.theta);
    out += ',';
    out += detail::format_double(pt.ca_pct);
    out += ',';
    out += detail::format_double(pt.cr_pct);
    out += ',';
    out += detail::format_double(pt.h);
    out += '\n';
  }
  return out;
}

}  // namespace uq
