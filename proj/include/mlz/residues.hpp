#pragma once

#include "mlz/core.hpp"
#include "mlz/evaluator.hpp"

namespace mlz {

// Residue of the multiple Hurwitz zeta function along H_{i,k}, at a point of
// the hyperplane: for H_{1,0} the depth-(r-1) function of the remaining
// coordinates; for i >= 2 the (0,k) entry of the B-matrix chain times
// zeta_{r-i} of the trailing coordinates (zeta_0 = 1).
EvalResult residue_hurwitz(const TwistParams& params, const Hyperplane& h, const EvalPoint& point,
                           const TruncationPolicy& policy);

} // namespace mlz
