#include "uq/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace uq {

namespace {

struct Block {
  double score_lo;
  double score_hi;
  double sum;
  double weight;
  double value() const { return sum / weight; }
};

double softmax_nll_one(const std::array<double, 2>& z, int label, double t) {
  const double a = z[0] / t, b = z[1] / t;
  const double m = std::max(a, b);
  const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
  return lse - (label == 0 ? a : b);
}

}  // namespace

IsotonicMap fit_isotonic(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("fit_isotonic: scores and labels differ in length");
  if (scores.size() < 2) throw std::invalid_argument("fit_isotonic: need at least 2 points");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i]))
      throw std::invalid_argument("fit_isotonic: non-finite score at index " + std::to_string(i));
    if (labels[i] != 0 && labels[i] != 1)
      throw std::invalid_argument("fit_isotonic: labels must be 0 or 1");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Pool exact score ties up front so the result is a function of the score,
  // then run PAVA over the pooled blocks.
  std::vector<Block> blocks;
  for (std::size_t idx : order) {
    const double s = scores[idx];
    const double y = static_cast<double>(labels[idx]);
    if (!blocks.empty() && blocks.back().score_hi == s) {
      blocks.back().sum += y;
      blocks.back().weight += 1.0;
    } else {
      blocks.push_back({s, s, y, 1.0});
    }
  }

  std::vector<Block> stack;
  for (const Block& b : blocks) {
    stack.push_back(b);
    while (stack.size() >= 2 && stack[stack.size() - 2].value() > stack.back().value()) {
      Block top = stack.back();
      stack.pop_back();
      stack.back().score_hi = top.score_hi;
      stack.back().sum += top.sum;
      stack.back().weight += top.weight;
    }
  }

  IsotonicMap map;
  for (const Block& pooled : stack) {
    for (const Block& b : blocks) {
      if (b.score_lo >= pooled.score_lo && b.score_hi <= pooled.score_hi) {
        map.knot_scores.push_back(b.score_lo);
        map.knot_values.push_back(pooled.value());
      }
    }
  }
  return map;
}

double apply_isotonic(const IsotonicMap& map, double s) {
  if (map.knot_scores.empty()) throw std::invalid_argument("apply_isotonic: empty map");
  const auto& xs = map.knot_scores;
  const auto& ys = map.knot_values;
  if (s <= xs.front()) return ys.front();
  if (s >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), s);
  const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  const std::size_t lo = hi - 1;
  const double span = xs[hi] - xs[lo];
  if (span <= 0.0) return ys[hi];
  const double w = (s - xs[lo]) / span;
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

double temperature_nll(const std::vector<std::array<double, 2>>& logits,
                       const std::vector<int>& labels, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) acc += softmax_nll_one(logits[i], labels[i], t);
  return acc;
}

Temperature fit_temperature(const std::vector<std::array<double, 2>>& logits,
                            const std::vector<int>& labels, double t_min, double t_max) {
  if (logits.empty()) throw std::invalid_argument("fit_temperature: empty input");
  if (logits.size() != labels.size())
    throw std::invalid_argument("fit_temperature: logits and labels differ in length");
  if (!(t_min > 0.0 && t_min <= t_max))
    throw std::invalid_argument("fit_temperature: invalid bounds");
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i][0]) || !std::isfinite(logits[i][1]))
      throw std::invalid_argument("fit_temperature: non-finite logit at index " +
                                  std::to_string(i));
    if (labels[i] != 0 && labels[i] != 1)
      throw std::invalid_argument("fit_temperature: labels must be 0 or 1");
  }

  const auto nll = [&](double t) { return temperature_nll(logits, labels, t); };

  // Geometric scan to bracket the minimum; ties resolve to the smallest T.
  constexpr int kGridPoints = 257;
  const double log_lo = std::log(t_min), log_hi = std::log(t_max);
  std::vector<double> grid(kGridPoints), vals(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (kGridPoints - 1));
    vals[i] = nll(grid[i]);
  }
  grid.front() = t_min;
  grid.back() = t_max;
  const double vmin = *std::min_element(vals.begin(), vals.end());
  const double tie_eps = 1e-12 * std::max(1.0, std::abs(vmin));
  int best = 0;
  while (vals[best] > vmin + tie_eps) ++best;

  double lo = grid[std::max(0, best - 1)];
  double hi = grid[std::min(kGridPoints - 1, best + 1)];

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = nll(x1), f2 = nll(x2);
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = nll(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = nll(x2);
    }
  }
  double t = std::clamp(0.5 * (a + b), t_min, t_max);
  double ft = nll(t);

  // Flat-region tie rule: prefer the smallest temperature that matches the
  // optimum, starting with the lower bound.
  for (double cand : {t_min, grid[best]}) {
    if (cand < t && nll(cand) <= ft + tie_eps) {
      t = cand;
      ft = nll(cand);
    }
  }
  return Temperature{t, t_min, t_max};
}

ProbabilityPair apply_temperature(const std::array<double, 2>& logits, const Temperature& temp) {
  if (!std::isfinite(logits[0]) || !std::isfinite(logits[1]))
    throw std::invalid_argument("apply_temperature: non-finite logits");
  if (!(temp.t > 0.0)) throw std::invalid_argument("apply_temperature: temperature must be > 0");
  const double a = logits[0] / temp.t, b = logits[1] / temp.t;
  const double m = std::max(a, b);
  const double ea = std::exp(a - m), eb = std::exp(b - m);
  const double z = ea + eb;
  return ProbabilityPair{{ea / z, eb / z}};
}

nlohmann::json isotonic_to_json(const IsotonicMap& map, const std::string& fitted_on) {
  return {{"schema", "calibration-v1"},
          {"method", "isotonic"},
          {"fitted_on", fitted_on},
          {"knot_scores", map.knot_scores},
          {"knot_values", map.knot_values}};
}

IsotonicMap isotonic_from_json(const nlohmann::json& j) {
  if (j.value("method", "") != "isotonic")
    throw std::invalid_argument("isotonic_from_json: not an isotonic artifact");
  IsotonicMap map;
  map.knot_scores = j.at("knot_scores").get<std::vector<double>>();
  map.knot_values = j.at("knot_values").get<std::vector<double>>();
  if (map.knot_scores.size() != map.knot_values.size() || map.knot_scores.empty())
    throw std::invalid_argument("isotonic_from_json: malformed knots");
  return map;
}

nlohmann::json temperature_to_json(const Temperature& temp, const std::string& fitted_on) {
  return {{"schema", "calibration-v1"},
          {"method", "temperature"},
          {"fitted_on", fitted_on},
          {"t", temp.t},
          {"t_min", temp.t_min},
          {"t_max", temp.t_max}};
}

Temperature temperature_from_json(const nlohmann::json& j) {
  if (j.value("method", "") != "temperature")
    throw std::invalid_argument("temperature_from_json: not a temperature artifact");
  Temperature temp;
  temp.t = j.at("t").get<double>();
  temp.t_min = j.value("t_min", 0.01);
  temp.t_max = j.value("t_max", 10.0);
  return temp;
}

}  // namespace uq
