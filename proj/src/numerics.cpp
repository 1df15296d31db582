#include "uq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uq {

namespace {

void require_positive_finite(double x, const char* fn) {
  if (!std::isfinite(x) || x <= 0.0)
    throw std::domain_error(std::string(fn) + ": argument must be positive and finite");
}

// Lanczos coefficients for g = 7.
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // ln(2*pi)/2

double log_gamma_lanczos(double x) {
  // Accurate for x >= 0.5; callers shift smaller arguments up.
  double acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (x - 1.0 + i);
  const double t = x + 6.5;
  return kHalfLogTwoPi + (x - 0.5) * std::log(t) - t + std::log(acc);
}

}  // namespace

double log_gamma(double x) {
  require_positive_finite(x, "log_gamma");
  if (x < 0.5) return log_gamma_lanczos(x + 1.0) - std::log(x);
  return log_gamma_lanczos(x);
}

double digamma(double x) {
  require_positive_finite(x, "digamma");
  double result = 0.0;
  // psi(x) = psi(x+1) - 1/x until the asymptotic range is reached
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi(x) ~ ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k})
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))));
  return result + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  require_positive_finite(x, "trigamma");
  double result = 0.0;
  while (x < 6.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // psi'(x) ~ 1/x + 1/(2x^2) + sum_k B_{2k} / x^{2k+1}
  const double series =
      inv2 * inv *
      (1.0 / 6 -
       inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66)))));
  return result + inv + 0.5 * inv2 + series;
}

double entropy(const ProbabilityPair& p, Epsilon eps) {
  if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || p[0] < 0.0 || p[1] < 0.0 ||
      std::abs(p.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("entropy: malformed probability distribution");
  double h = 0.0;
  for (int j = 0; j < kNumClasses; ++j) h -= p[j] * std::log(p[j] + eps.value);
  return std::max(h, 0.0);
}

double multiset_mean(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("multiset_mean: empty input");
  std::sort(values.begin(), values.end());
  const double anchor = values.front();
  double acc = 0.0;
  for (double v : values) acc += v - anchor;
  return anchor + acc / static_cast<double>(values.size());
}

EnsembleOutput make_ensemble_output(std::vector<ProbabilityPair> members) {
  if (members.empty()) throw std::invalid_argument("ensemble output needs at least one member");
  std::vector<double> p0(members.size()), p1(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!members[i].is_valid())
      throw std::invalid_argument("ensemble member " + std::to_string(i) +
                                  " is not a distribution");
    p0[i] = members[i][0];
    p1[i] = members[i][1];
  }
  EnsembleOutput out;
  out.mean_probs = ProbabilityPair{{multiset_mean(std::move(p0)), multiset_mean(std::move(p1))}};
  out.member_probs = std::move(members);
  return out;
}

}  // namespace uq
