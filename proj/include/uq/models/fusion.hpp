#pragma once

#include <stdexcept>

#include "uq/types.hpp"

namespace uq {

/// w * p_a + (1 - w) * p_b.
inline ProbabilityPair fuse(const ProbabilityPair& p_a, const ProbabilityPair& p_b, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("fuse: weight must lie in [0, 1]");
  if (!p_a.is_valid() || !p_b.is_valid())
    throw std::invalid_argument("fuse: inputs must be probability distributions");
  return ProbabilityPair{{w * p_a[0] + (1.0 - w) * p_b[0], w * p_a[1] + (1.0 - w) * p_b[1]}};
}

}  // namespace uq
