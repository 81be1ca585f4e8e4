#include "mlz/residues.hpp"

#include "mlz/classifier.hpp"
#include "mlz/matrices.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace mlz {

namespace {

// Guard the trailing zeta factor against its own polar hyperplanes.
void check_suffix_poles(const TwistParams& suffix, const EvalPoint& pt, double tol) {
    SingularityReport rep = classify_hurwitz(suffix);
    for (const auto& fam : rep.families) {
        if (fam.certainty == Certainty::removable) continue;
        Complex u(0, 0);
        for (int i = 0; i < fam.i; ++i) u += pt.coord(i);
        if (std::abs(u.imag()) > tol) continue;
        const int kstar = static_cast<int>(std::lround(fam.i - u.real()));
        if (kstar < 0 || !fam.k_set.contains(kstar)) continue;
        if (std::abs(u - Complex(fam.i - kstar, 0.0)) <= tol)
            throw EvalError(ErrorClass::pole_proximity,
                            "residue_hurwitz: residue factor has a pole at the given point (H_{" +
                                std::to_string(fam.i) + "," + std::to_string(kstar) + "})");
    }
}

} // namespace

EvalResult residue_hurwitz(const TwistParams& params, const Hyperplane& h, const EvalPoint& point,
                           const TruncationPolicy& policy) {
    policy.validate();
    if (!params.is_hurwitz())
        throw EvalError(ErrorClass::unsupported_lerch,
                        "residue_hurwitz: residues are only computed for vanishing twists");
    const int r = params.depth;
    if (point.dim() != r)
        throw EvalError(ErrorClass::usage, "residue_hurwitz: point dimension mismatch");
    if (h.i > r) throw EvalError(ErrorClass::usage, "residue_hurwitz: hyperplane index exceeds depth");
    if (std::abs(hyperplane_offset(point, h)) > policy.pole_tolerance)
        throw EvalError(ErrorClass::off_hyperplane,
                        "residue_hurwitz: point does not lie on the named hyperplane");

    // H_{1,0}: restriction of the depth-(r-1) function of (s_2, ..., s_r).
    if (h.i == 1) {
        if (r == 1) {
            EvalResult unit;
            unit.value = Complex(1.0, 0.0);
            unit.region_index = 0;
            return unit;
        }
        Eigen::VectorXd alp(r - 1);
        Eigen::VectorXcd rest(r - 1);
        for (int i = 1; i < r; ++i) {
            alp[i - 1] = params.alphas[i];
            rest[i - 1] = point.coord(i);
        }
        TwistParams suffix = TwistParams::hurwitz(alp);
        EvalPoint pt(rest);
        check_suffix_poles(suffix, pt, policy.pole_tolerance);
        return eval_continued(suffix, pt, policy);
    }

    // H_{i,k}, i >= 2: B-chain first-row entry times the trailing factor.
    std::vector<Complex> alphas(params.alphas.data(), params.alphas.data() + r);
    std::vector<Complex> tvals;
    Complex acc(0, 0);
    for (int d = 1; d <= h.i - 1; ++d) {
        acc += point.coord(d - 1);
        tvals.push_back(acc - static_cast<double>(d));
    }
    const Complex chain = first_row_chain<Complex>(alphas, h.i, tvals, h.k);

    EvalResult res;
    res.value = chain;
    res.error_bound = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(chain);
    res.region_index = region_index(point).m;
    if (h.i < r) {
        Eigen::VectorXd alp(r - h.i);
        Eigen::VectorXcd rest(r - h.i);
        for (int i = h.i; i < r; ++i) {
            alp[i - h.i] = params.alphas[i];
            rest[i - h.i] = point.coord(i);
        }
        TwistParams suffix = TwistParams::hurwitz(alp);
        EvalPoint pt(rest);
        check_suffix_poles(suffix, pt, policy.pole_tolerance);
        EvalResult factor = eval_continued(suffix, pt, policy);
        res.error_bound = std::abs(chain) * factor.error_bound +
                          std::abs(factor.value) * res.error_bound;
        res.value = chain * factor.value;
        res.diagnostics = factor.diagnostics;
    }
    return res;
}

} // namespace mlz
