#pragma once

#include "uq/types.hpp"

namespace uq {

/// The three uncertainty metrics, all in nats.
/// knowledge_uncertainty == entropy_of_expected - expected_entropy by
/// construction; it is nonnegative up to numerical noise (Jensen).
struct UncertaintyTriple {
  double expected_entropy = 0.0;
  double entropy_of_expected = 0.0;
  double knowledge_uncertainty = 0.0;
};

/// Ensemble metrics: mean member entropy, entropy of the mean prediction,
/// and their difference (member disagreement).
UncertaintyTriple ensemble_uncertainty(const EnsembleOutput& out, Epsilon eps = Epsilon{});

/// Expected categorical distribution under Dir(alpha): alpha_k / alpha_0.
ProbabilityPair dirichlet_probabilities(const DirichletParams& d);

/// Dirichlet analogues: expected entropy via digamma, entropy of the mean
/// distribution, and their difference (the Dirichlet mutual information).
UncertaintyTriple dirichlet_uncertainty(const DirichletParams& d, Epsilon eps = Epsilon{});

}  // namespace uq
