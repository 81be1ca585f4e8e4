#include "mlz/residues.hpp"

#include "mlz/classifier.hpp"
#include "mlz/matrices.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mlz;
using namespace mlz::testing;

namespace {

TruncationPolicy policy_eps(double eps) {
    TruncationPolicy p;
    p.eps = eps;
    return p;
}

// Richardson step for a simple pole: two offsets eliminate the O(eps) term.
Complex laurent_extrapolate(const TwistParams& params, const EvalPoint& base,
                            const Hyperplane& h, int coord, double e1, double e2,
                            const TruncationPolicy& pol) {
    auto probe = [&](double ep) {
        EvalPoint p = base;
        p.base[coord] += ep;
        EvalResult r = eval_continued(params, p, pol);
        return hyperplane_offset(p, h) * r.value;
    };
    Complex f1 = probe(e1), f2 = probe(e2);
    return (e1 * f2 - e2 * f1) / (e1 - e2);
}

} // namespace

TEST_CASE("residue along H_{1,0} restricts to the depth-(r-1) function") {
    TruncationPolicy pol = policy_eps(1e-10);
    auto params = hurwitz_of({0, 0});
    EvalResult r = residue_hurwitz(params, Hyperplane(1, 0), point2({1, 0}, {3, 0}), pol);
    CHECK(r.value.real() == doctest::Approx(1.2020569031595943).epsilon(1e-10));

    // depth 1: residue of the Hurwitz zeta at s = 1 is 1
    EvalResult one = residue_hurwitz(hurwitz_of({0.3}), Hyperplane(1, 0), point1({1, 0}), pol);
    CHECK(one.value == Complex(1.0, 0.0));
}

TEST_CASE("residues along H_{2,k} from the B-matrix chain") {
    TruncationPolicy pol = policy_eps(1e-10);
    auto params = hurwitz_of({0, 0});
    CHECK(residue_hurwitz(params, Hyperplane(2, 0), point2({2, 0}, {0, 0}), pol).value.real() ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(residue_hurwitz(params, Hyperplane(2, 1), point2({3, 0}, {-2, 0}), pol).value.real() ==
          doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(residue_hurwitz(params, Hyperplane(2, 3), point2({4, 0}, {-5, 0}), pol).value ==
          Complex(0.0, 0.0));
    // 1/(s_1 - 1) dependence on H_{2,0}
    CHECK(residue_hurwitz(params, Hyperplane(2, 0), point2({4, 0}, {-2, 0}), pol).value.real() ==
          doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("residue error paths") {
    TruncationPolicy pol = policy_eps(1e-10);
    auto params = hurwitz_of({0, 0});
    try {
        (void)residue_hurwitz(params, Hyperplane(2, 1), point2({3, 0}, {-1, 0}), pol);
        FAIL("expected off-hyperplane");
    } catch (const EvalError& e) {
        CHECK(e.cls() == ErrorClass::off_hyperplane);
    }
    try {
        (void)residue_hurwitz(params_of({0.5, 0}, {0, 0}), Hyperplane(2, 1),
                              point2({3, 0}, {-2, 0}), pol);
        FAIL("expected unsupported-lerch");
    } catch (const EvalError& e) {
        CHECK(e.cls() == ErrorClass::unsupported_lerch);
    }
    // the residue factor itself sits on a pole: (1, 1, 0.5) has zeta_2 factor at s_2 = 1
    try {
        (void)residue_hurwitz(hurwitz_of({0, 0, 0}), Hyperplane(1, 0),
                              point3({1, 0}, {1, 0}, {0.5, 0}), pol);
        FAIL("expected pole-proximity of the residue factor");
    } catch (const EvalError& e) {
        CHECK(e.cls() == ErrorClass::pole_proximity);
    }
}

TEST_CASE("Laurent limits agree with the chain residues (depth 2)") {
    TruncationPolicy pol = policy_eps(1e-7);
    auto params = hurwitz_of({0, 0});
    struct Case {
        Hyperplane h;
        EvalPoint pt;
        double want;
    };
    const Case cases[] = {
        {Hyperplane(2, 0), point2({2, 0}, {0, 0}), 1.0},
        {Hyperplane(2, 1), point2({3, 0}, {-2, 0}), -0.5},
        {Hyperplane(1, 0), point2({1, 0}, {3, 0}), 1.2020569031595943},
    };
    for (const auto& c : cases) {
        Complex extr = laurent_extrapolate(params, c.pt, c.h, 1, 1e-4, 1e-5, pol);
        CHECK(std::abs(extr - Complex(c.want, 0)) < 1e-4);
        EvalResult exact = residue_hurwitz(params, c.h, c.pt, pol);
        CHECK(std::abs(extr - exact.value) < 1e-4);
    }
}

TEST_CASE("Laurent limits agree with the chain residues (depth 3)") {
    TruncationPolicy pol = policy_eps(1e-7);
    auto params = hurwitz_of({0, 0, 0});
    EvalPoint pt = point3({2.5, 0}, {-1.5, 0}, {2.25, 0});   // on H_{2,1}
    REQUIRE(std::abs(hyperplane_offset(pt, Hyperplane(2, 1))) < 1e-12);
    EvalResult exact = residue_hurwitz(params, Hyperplane(2, 1), pt, pol);
    Complex extr = laurent_extrapolate(params, pt, Hyperplane(2, 1), 1, 1e-4, 1e-5, pol);
    CHECK(std::abs(extr - exact.value) < 1e-4);

    EvalPoint pt3h = point3({2.0, 0}, {0.5, 0}, {-0.5, 0});   // on H_{3,1}
    REQUIRE(std::abs(hyperplane_offset(pt3h, Hyperplane(3, 1))) < 1e-12);
    EvalResult exact3 = residue_hurwitz(params, Hyperplane(3, 1), pt3h, pol);
    Complex extr3 = laurent_extrapolate(params, pt3h, Hyperplane(3, 1), 2, 1e-4, 1e-5, pol);
    CHECK(std::abs(extr3 - exact3.value) < 1e-4);
}

TEST_CASE("numeric pole witness: growth along proven poles, boundedness at removable ones") {
    TruncationPolicy pol = policy_eps(1e-6);
    auto params = hurwitz_of({0, 0});
    // proven pole H_{2,0}: |f| ~ C/eps, so |f(eps)| / |f(eps/2)| ~ 1/2
    auto mag = [&](double ep) {
        return std::abs(eval_continued(params, point2({2, 0}, {ep, 0}), pol).value);
    };
    double ratio = mag(1e-3) / mag(5e-4);
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.25));

    // removable H_{2,3}: bounded values along the transversal
    TruncationPolicy loose = policy_eps(1e-3);
    double m1 = std::abs(eval_continued(params, point2({4, 0}, {-5 + 1e-3, 0}), loose).value);
    double m2 = std::abs(eval_continued(params, point2({4, 0}, {-5 + 5e-4, 0}), loose).value);
    CHECK(m1 < 10.0);
    CHECK(m2 < 10.0);
    CHECK(m2 / m1 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("residue consistency with the classifier") {
    TruncationPolicy pol = policy_eps(1e-9);
    for (auto alphas : {std::vector<double>{0, 0}, std::vector<double>{0, 0.5}}) {
        auto params = hurwitz_of(alphas);
        auto rep = classify_hurwitz(params);
        for (const auto& fam : rep.families) {
            if (fam.i != 2) continue;
            for (int k : fam.k_set.enumerate(6)) {
                // pick a generic point on H_{2,k}
                EvalPoint pt = point2({3.25, 0}, {2.0 - k - 3.25, 0});
                EvalResult r = residue_hurwitz(params, Hyperplane(2, k), pt, pol);
                if (fam.certainty == Certainty::proven_pole)
                    CHECK(std::abs(r.value) > 1e-12);
                else
                    CHECK(std::abs(r.value) == 0.0);
            }
        }
    }
}
