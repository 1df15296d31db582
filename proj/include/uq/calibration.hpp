#pragma once

#include <array>
#include <string>
#include <vector>

#include "uq/types.hpp"

#include "json.hpp"

namespace uq {

/// Nondecreasing piecewise-linear map from raw scores to probabilities.
/// knot_scores are strictly increasing; knot_values are nondecreasing in [0,1].
struct IsotonicMap {
  std::vector<double> knot_scores;
  std::vector<double> knot_values;
};

/// Softmax temperature with the bounds it was fitted under.
struct Temperature {
  double t = 1.0;
  double t_min = 0.01;
  double t_max = 10.0;
};

/// Isotonic least-squares fit of binary labels against scores, solved by
/// pool-adjacent-violators. Tied scores are pooled before the sweep so the
/// fitted map is a function of the score.
IsotonicMap fit_isotonic(const std::vector<double>& scores, const std::vector<int>& labels);

/// Evaluates the fitted map: linear interpolation between knots, clamped to
/// the boundary knot values outside the fitted range. Total on all reals.
double apply_isotonic(const IsotonicMap& map, double s);

/// Finds the temperature minimizing the NLL of softmax(z/T) over [t_min, t_max].
/// Coarse scan plus golden-section refinement; flat regions resolve to the
/// smallest T.
Temperature fit_temperature(const std::vector<std::array<double, 2>>& logits,
                            const std::vector<int>& labels, double t_min = 0.01,
                            double t_max = 10.0);

/// softmax(z / T).
ProbabilityPair apply_temperature(const std::array<double, 2>& logits, const Temperature& temp);

/// NLL of softmax(z/T) against labels; the objective fit_temperature minimizes.
double temperature_nll(const std::vector<std::array<double, 2>>& logits,
                       const std::vector<int>& labels, double t);

// Calibration artifacts serialize to JSON together with the identifier of the
// data split they were fitted on.
nlohmann::json isotonic_to_json(const IsotonicMap& map, const std::string& fitted_on);
IsotonicMap isotonic_from_json(const nlohmann::json& j);
nlohmann::json temperature_to_json(const Temperature& temp, const std::string& fitted_on);
Temperature temperature_from_json(const nlohmann::json& j);

}  // namespace uq
