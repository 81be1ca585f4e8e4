#pragma once

#include "mlz/core.hpp"

#include <complex>

namespace mlz {

// Knobs governing series truncation and the direct/continued switch.
struct TruncationPolicy {
    double eps = 1e-10;
    double direct_cutoff_margin = 0.5;  // direct sums need Re(s_1+..+s_i) >= i + margin
    double max_terms = 1e7;
    int max_k = 200;
    double pole_tolerance = 1e-8;
    double conditioning_floor = 1e-8;

    void validate() const {
        if (!(eps > 0) || !(direct_cutoff_margin > 0) || !(max_terms > 0) || max_k <= 0 ||
            !(pole_tolerance > 0) || !(conditioning_floor > 0))
            throw EvalError(ErrorClass::usage, "TruncationPolicy: all fields must be positive");
    }
};

struct Diagnostics {
    long long terms_summed = 0;
    long long cache_hits = 0;
    long long evaluations = 0;
    int recursion_depth = 0;
};

struct EvalResult {
    Complex value{0.0, 0.0};
    double error_bound = 0.0;
    int region_index = 0;
    Diagnostics diagnostics;
};

// Nested direct summation over n_1 > ... > n_r >= 1 with an iterated
// integral-comparison tail estimate. Requires margin >= policy cutoff.
EvalResult eval_direct(const TwistParams& params, const EvalPoint& s, const TruncationPolicy& policy);

// Depth-1 evaluation anywhere away from the single pole (s = 1 when the
// twist vanishes), by the Ramanujan-type shift identities.
EvalResult eval_depth1(const TwistParams& params, Complex s, const TruncationPolicy& policy);

// Full evaluation of L_r at s: direct summation deep inside U_r, recursive
// continuation by the generalized Ramanujan identities elsewhere.
EvalResult eval_continued(const TwistParams& params, const EvalPoint& s, const TruncationPolicy& policy);

// Classical Euler-Maclaurin continuation of sum_{n>=0} (n+a)^{-s}; the
// independent cross-check oracle. Note zeta_1(s; alpha) = this at a = 1+alpha.
Complex euler_maclaurin_hurwitz(Complex s, double a, double eps);

// Both sides of the applicable shift identity evaluated by direct summation;
// returns |LHS - RHS|. Requires depth >= 2 and margin >= policy cutoff.
double identity_residual(const TwistParams& params, const EvalPoint& s, int max_k,
                         const TruncationPolicy& policy);

// |sum_{k=0}^{K} (s-1)_k (zeta(s+k) - 1) - 1| for Re(s) > 1.
double ramanujan_residual(Complex s, int max_k, double eps);

} // namespace mlz
