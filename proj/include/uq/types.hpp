#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uq {

// Class convention used throughout: 0 = benign, 1 = malware.
inline constexpr int kNumClasses = 2;

/// Two-class probability distribution, the prediction currency of the library.
struct ProbabilityPair {
  std::array<double, 2> p{0.5, 0.5};

  double operator[](std::size_t i) const { return p[i]; }
  double& operator[](std::size_t i) { return p[i]; }

  double sum() const { return p[0] + p[1]; }

  // argmax, ties resolve to class 0
  int predicted_label() const { return p[1] > p[0] ? 1 : 0; }

  bool is_valid(double tol = 1e-9) const {
    return std::isfinite(p[0]) && std::isfinite(p[1]) && p[0] >= -tol && p[1] >= -tol &&
           std::abs(sum() - 1.0) <= tol;
  }
};

inline ProbabilityPair make_probability_pair(double p0, double p1) {
  ProbabilityPair out{{p0, p1}};
  if (!out.is_valid())
    throw std::invalid_argument("probability pair [" + std::to_string(p0) + ", " +
                                std::to_string(p1) + "] is not a distribution");
  return out;
}

/// Guard added inside logarithms: entropy(p) = -sum_j p_j * log(p_j + eps).
struct Epsilon {
  double value = 1e-12;

  explicit Epsilon(double v = 1e-12) : value(v) {
    if (!(v > 0.0 && v < 1e-6)) throw std::invalid_argument("epsilon must lie in (0, 1e-6)");
  }
};

/// Dirichlet concentration parameters for the two-class case.
/// alpha0 is kept consistent with the sum of the alphas on construction.
struct DirichletParams {
  std::array<double, 2> alphas{1.0, 1.0};
  double alpha0 = 2.0;

  static DirichletParams make(double a0, double a1) {
    if (!(std::isfinite(a0) && std::isfinite(a1) && a0 > 0.0 && a1 > 0.0))
      throw std::invalid_argument("Dirichlet concentrations must be strictly positive");
    return DirichletParams{{a0, a1}, a0 + a1};
  }
};

/// Per-member ensemble probabilities plus their componentwise mean.
struct EnsembleOutput {
  std::vector<ProbabilityPair> member_probs;
  ProbabilityPair mean_probs;
};

/// Mean that depends only on the multiset of values and is exact when all
/// inputs are identical (anchor at the minimum, accumulate sorted offsets).
double multiset_mean(std::vector<double> values);

/// Builds an EnsembleOutput whose mean satisfies the componentwise-mean
/// invariant; identical members reproduce the common output bit for bit.
EnsembleOutput make_ensemble_output(std::vector<ProbabilityPair> members);

}  // namespace uq
