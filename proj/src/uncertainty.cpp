#include "uq/uncertainty.hpp"

#include <stdexcept>

#include "uq/numerics.hpp"

namespace uq {

UncertaintyTriple ensemble_uncertainty(const EnsembleOutput& out, Epsilon eps) {
  if (out.member_probs.empty())
    throw std::invalid_argument("ensemble_uncertainty: empty member list");
  std::vector<double> member_entropies;
  member_entropies.reserve(out.member_probs.size());
  for (const ProbabilityPair& p : out.member_probs) member_entropies.push_back(entropy(p, eps));

  UncertaintyTriple t;
  t.expected_entropy = multiset_mean(std::move(member_entropies));
  t.entropy_of_expected = entropy(out.mean_probs, eps);
  t.knowledge_uncertainty = t.entropy_of_expected - t.expected_entropy;
  return t;
}

ProbabilityPair dirichlet_probabilities(const DirichletParams& d) {
  if (!(d.alphas[0] > 0.0 && d.alphas[1] > 0.0))
    throw std::invalid_argument("dirichlet_probabilities: concentrations must be positive");
  return ProbabilityPair{{d.alphas[0] / d.alpha0, d.alphas[1] / d.alpha0}};
}

UncertaintyTriple dirichlet_uncertainty(const DirichletParams& d, Epsilon eps) {
  const ProbabilityPair mean = dirichlet_probabilities(d);
  UncertaintyTriple t;
  const double psi_a0 = digamma(d.alpha0 + 1.0);
  double ee = 0.0;
  for (int k = 0; k < kNumClasses; ++k)
    ee -= mean[k] * (digamma(d.alphas[k] + 1.0) - psi_a0);
  t.expected_entropy = ee;
  t.entropy_of_expected = entropy(mean, eps);
  t.knowledge_uncertainty = t.entropy_of_expected - t.expected_entropy;
  return t;
}

}  // namespace uq
