#include "mlz/evaluator.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mlz;
using namespace mlz::testing;

namespace {

const double kPi = std::numbers::pi;

TruncationPolicy policy_eps(double eps) {
    TruncationPolicy p;
    p.eps = eps;
    return p;
}

} // namespace

TEST_CASE("Euler-Maclaurin oracle") {
    CHECK(euler_maclaurin_hurwitz({2, 0}, 1.0, 1e-13).real() ==
          doctest::Approx(kPi * kPi / 6).epsilon(1e-13));
    CHECK(euler_maclaurin_hurwitz({-1, 0}, 1.0, 1e-13).real() ==
          doctest::Approx(-1.0 / 12).epsilon(1e-12));
    CHECK(euler_maclaurin_hurwitz({2, 0}, 1.5, 1e-13).real() ==
          doctest::Approx(kPi * kPi / 2 - 4).epsilon(1e-13));
    CHECK(euler_maclaurin_hurwitz({-1.5, 0}, 0.7, 1e-12).real() ==
          doctest::Approx(0.0234782743331615).epsilon(1e-10));
    CHECK_THROWS_AS((void)euler_maclaurin_hurwitz({1, 0}, 1.0, 1e-10), EvalError);
}

TEST_CASE("boundary identity: (n+a-1)^{-s} = sum_k (s)_k (n+a)^{-s-k-1}") {
    for (double alpha : {0.0, 0.37, 0.9}) {
        for (Complex s : {Complex(2.5, 0), Complex(-1.5, 2.0)}) {
            for (int n : {2, 3, 7}) {
                Complex target = std::exp(-s * std::log(n + alpha - 1));
                Complex acc(0, 0);
                int k = -1;
                for (; k <= 80; ++k)
                    acc += pochhammer(s, k) *
                           std::exp(-(s + Complex(k + 1, 0)) * std::log(n + alpha));
                CHECK(std::abs(acc - target) < 1e-10 * (1.0 + std::abs(target)));
            }
        }
    }
}

TEST_CASE("Ramanujan identity residual at depth 1") {
    CHECK(ramanujan_residual({2, 0}, 60, 1e-12) <= 1e-10);
    CHECK(ramanujan_residual({3.5, 0}, 60, 1e-12) <= 1e-10);
    CHECK(ramanujan_residual({2, 1.7}, 60, 1e-12) <= 1e-10);
}

TEST_CASE("eval_direct reference values") {
    TruncationPolicy pol = policy_eps(1e-10);
    CHECK(eval_direct(params_of({0}, {0}), point1({2, 0}), pol).value.real() ==
          doctest::Approx(1.6449340668482264).epsilon(1e-10));
    CHECK(eval_direct(params_of({0.5}, {0}), point1({2, 0}), pol).value.real() ==
          doctest::Approx(-0.8224670334241132).epsilon(1e-9));
    CHECK(eval_direct(hurwitz_of({0, 0}), point2({3, 0}, {2, 0}), pol).value.real() ==
          doctest::Approx(0.22881039760335376).epsilon(1e-9));
    CHECK(eval_direct(hurwitz_of({0, 0.3}), point2({3, 0}, {2.5, 0}), pol).value.real() ==
          doctest::Approx(0.11766080594928197).epsilon(1e-9));
    CHECK(eval_direct(hurwitz_of({0, 0}), point2({3.5, 0}, {-0.5, 0}), pol).value.real() ==
          doctest::Approx(0.30600285937615793).epsilon(1e-9));
}

TEST_CASE("eval_direct respects the value/bound contract against brute force") {
    TruncationPolicy pol = policy_eps(1e-9);
    auto params = params_of({0.2, 0.7}, {0.1, 0.4});
    EvalPoint pt = point2({3, 1}, {2.5, 0});
    EvalResult r = eval_direct(params, pt, pol);
    // independent plain loop, padded by its own crude tail
    Complex brute = brute_double_sum(0.2, 0.7, 0.1, 0.4, {3, 1}, {2.5, 0}, 4000);
    CHECK(std::abs(r.value - brute) < r.error_bound + 5e-7);
}

TEST_CASE("eval_direct error paths") {
    TruncationPolicy pol = policy_eps(1e-10);
    CHECK_THROWS_WITH_AS((void)eval_direct(params_of({0}, {0}), point1({1.2, 0}), pol),
                         doctest::Contains("margin"), EvalError);
    TruncationPolicy tiny = pol;
    tiny.max_terms = 500;
    try {
        (void)eval_direct(hurwitz_of({0, 0}), point2({2, 0}, {1.0, 0}), tiny);
        FAIL("expected accuracy error");
    } catch (const EvalError& e) {
        CHECK(e.cls() == ErrorClass::accuracy);
        CHECK(e.achieved_bound() > 0.0);
    }
}

TEST_CASE("depth-1 continuation matches the independent oracle") {
    TruncationPolicy pol = policy_eps(1e-10);
    auto zeta_params = params_of({0}, {0});
    CHECK(eval_depth1(zeta_params, {-1, 0}, pol).value.real() ==
          doctest::Approx(-1.0 / 12).epsilon(1e-11));
    CHECK(eval_depth1(zeta_params, {0, 0}, pol).value.real() ==
          doctest::Approx(-0.5).epsilon(1e-11));
    CHECK(eval_depth1(zeta_params, {-3, 0}, pol).value.real() ==
          doctest::Approx(1.0 / 120).epsilon(1e-10));
    CHECK(eval_depth1(params_of({0}, {0.5}), {2, 0}, pol).value.real() ==
          doctest::Approx(kPi * kPi / 2 - 4).epsilon(1e-10));

    // grid sweep against Euler-Maclaurin
    for (double alpha : {0.0, 0.1, 0.5, 0.9}) {
        auto params = params_of({0}, {alpha});
        for (double sr : {-2.5, -0.75, 0.5, 1.5, 3.0}) {
            for (double si : {0.0, 1.3}) {
                Complex s(sr, si);
                EvalResult r = eval_depth1(params, s, pol);
                Complex em = euler_maclaurin_hurwitz(s, 1.0 + alpha, 1e-13);
                CHECK(std::abs(r.value - em) <= r.error_bound + 1e-12);
            }
        }
    }
}

TEST_CASE("depth-1 continuation matches mpmath Lerch values") {
    TruncationPolicy pol = policy_eps(1e-10);
    auto close = [&](EvalResult r, Complex want) {
        CHECK(std::abs(r.value - want) < 1e-9);
    };
    close(eval_depth1(params_of({1.0 / 3}, {0}), {2, 0}, pol),
          {-0.5483113556160755, 0.6766277376064358});
    close(eval_depth1(params_of({1.0 / 3}, {0}), {-2, 0}, pol), {0.0, -0.1924500897298753});
    close(eval_depth1(params_of({1.0 / 3}, {0.25}), {-1.5, 0}, pol),
          {-0.3614884714127969, -0.0605928976637265});
    close(eval_depth1(params_of({0.5}, {0}), {-1, 0}, pol), {-0.25, 0.0});
    close(eval_depth1(params_of({0.7}, {0.35}), {2.2, 0}, pol),
          {-0.2304865845179142, -0.3896925819252488});
    // small alpha: slow-decay regime for the raw shift identity
    close(eval_depth1(params_of({0}, {0.1}), {-2.5, 0}, pol), {-0.0022186518400185439, 0.0});
}

TEST_CASE("depth-1 pole and conditioning errors") {
    TruncationPolicy pol = policy_eps(1e-10);
    try {
        (void)eval_depth1(params_of({0}, {0}), {1.0 + 1e-10, 0}, pol);
        FAIL("expected pole-proximity");
    } catch (const EvalError& e) {
        CHECK(e.cls() == ErrorClass::pole_proximity);
    }
    try {
        (void)eval_depth1(params_of({1e-12}, {0}), {2, 0}, pol);
        FAIL("expected conditioning");
    } catch (const EvalError& e) {
        CHECK(e.cls() == ErrorClass::conditioning);
    }
}

TEST_CASE("identity residuals: depth-1 branches validated in-region") {
    TruncationPolicy pol = policy_eps(1e-10);
    // (a): alpha = 0, twist 0 (the Ramanujan rearrangement)
    CHECK(identity_residual(params_of({0}, {0}), point1({2.5, 0}), 60, pol) <= 1e-10);
    // (b): alpha in (0,1)
    CHECK(identity_residual(params_of({0}, {0.3}), point1({3.0, 0.7}), 60, pol) <= 1e-10);
    CHECK(identity_residual(params_of({0}, {0.85}), point1({3.5, 0}), 80, pol) <= 1e-9);
    // (c): twisted, alpha in (0,1)
    CHECK(identity_residual(params_of({0.25}, {0.5}), point1({3.0, 0}), 60, pol) <= 1e-9);
    // (d): twisted, alpha = 0
    CHECK(identity_residual(params_of({0.4}, {0}), point1({3.0, -1.2}), 60, pol) <= 1e-9);
}

TEST_CASE("identity residuals: depth-2 reference points") {
    TruncationPolicy pol = policy_eps(1e-10);
    CHECK(identity_residual(hurwitz_of({0, 0.3}), point2({3, 0}, {2.5, 0}), 60, pol) <= 1e-8);
    CHECK(identity_residual(params_of({0.2, 0.7}, {0.1, 0.4}), point2({3, 1}, {2.5, 0}), 60, pol) <=
          1e-8);
}

TEST_CASE("Euler relation: continued and direct agree with zeta(3)") {
    TruncationPolicy pol = policy_eps(1e-8);
    auto params = hurwitz_of({0, 0});
    EvalResult direct = eval_direct(params, point2({2, 0}, {1, 0}), pol);
    EvalResult continued = eval_continued(params, point2({2, 0}, {1, 0}), pol);
    CHECK(std::abs(direct.value.real() - 1.2020569031595943) <= 1e-8);
    CHECK(std::abs(continued.value.real() - 1.2020569031595943) <= 1e-8);
}

TEST_CASE("continued values at off-region depth-2 reference points") {
    TruncationPolicy pol = policy_eps(1e-10);
    CHECK(eval_continued(hurwitz_of({0, 0}), point2({-0.5, 0}, {4, 0}), pol).value.real() ==
          doctest::Approx(-1.5011848298286942).epsilon(1e-10));
    CHECK(eval_continued(hurwitz_of({0.2, 0.6}), point2({-0.5, 0}, {4, 0}), pol).value.real() ==
          doctest::Approx(-0.36985299271674537).epsilon(1e-10));
    Complex v = eval_continued(hurwitz_of({0, 0.5}), point2({0.5, 1}, {3, 0}), pol).value;
    CHECK(std::abs(v - Complex(-0.4214708501896077, -0.1781583059762149)) < 1e-9);
    CHECK(eval_depth1(params_of({0}, {0}), {-9.5, 0}, pol).value.real() ==
          doctest::Approx(euler_maclaurin_hurwitz({-9.5, 0}, 1.0, 1e-13).real())
              .epsilon(1e-8));
}

TEST_CASE("continued values off-region agree with the depth-2 EM bridge") {
    TruncationPolicy pol = policy_eps(1e-9);
    // Re(s1+s2) > 2 with Re(s1) < 1: off-region for direct, in range for the bridge.
    for (auto [s1, s2, a1, a2] :
         {std::tuple{Complex(0.25, 0), Complex(3.25, 0), 0.0, 0.0},
          std::tuple{Complex(-1.5, 0.5), Complex(4.2, 0), 0.3, 0.6},
          std::tuple{Complex(0.5, -1.0), Complex(2.9, 0), 0.0, 0.25}}) {
        Complex bridge = depth2_em_oracle(s1, s2, a1, a2);
        EvalResult r = eval_continued(hurwitz_of({a1, a2}), point2(s1, s2), pol);
        CHECK(std::abs(r.value - bridge) < 1e-7);   // bridge truncation dominates
    }
}

TEST_CASE("overlap: continued equals direct inside the region") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TruncationPolicy pol = policy_eps(1e-9);
    int checked = 0;
    for (int depth = 1; depth <= 3; ++depth) {
        for (int trial = 0; trial < 8; ++trial) {
            Eigen::VectorXd lam(depth), alp(depth);
            for (int i = 0; i < depth; ++i) {
                lam[i] = (trial % 2 == 0) ? 0.0 : std::floor(u(rng) * 8.0) / 8.0;
                alp[i] = std::floor(u(rng) * 5.0) / 8.0;
            }
            TwistParams params(lam, alp);
            Eigen::VectorXcd v(depth);
            double acc = 0.0;
            for (int i = 0; i < depth; ++i) {
                double target = (i + 1) + 2.3 + u(rng);
                v[i] = Complex(std::max(target - acc, 0.4), u(rng) - 0.5);
                acc += v[i].real();
            }
            EvalPoint pt(v);
            EvalResult a = eval_direct(params, pt, pol);
            EvalResult b = eval_continued(params, pt, pol);
            CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
            ++checked;
        }
    }
    CHECK(checked >= 20);
}

TEST_CASE("truncation-policy independence off-region") {
    TruncationPolicy narrow = policy_eps(1e-9);
    narrow.max_k = 60;
    TruncationPolicy wide = narrow;
    wide.max_k = 120;
    auto points = {point2({-0.5, 0}, {4, 0}), point2({0.3, 1.0}, {2.4, 0}),
                   point2({-1.2, 0}, {4.4, -0.5})};
    for (const auto& pt : points) {
        for (auto params : {hurwitz_of({0, 0.3}), params_of({0.25, 0.5}, {0.125, 0.625})}) {
            EvalResult a = eval_continued(params, pt, narrow);
            EvalResult b = eval_continued(params, pt, wide);
            CHECK(std::abs(a.value - b.value) <= a.error_bound + b.error_bound);
        }
    }
}

TEST_CASE("entirety witness: evaluation on nominal hyperplanes with nonintegral twists") {
    // mu_1 = 1/3, mu_2 = 7/12: both nonintegral, so the function is entire.
    auto params = params_of({1.0 / 3, 0.25}, {0, 0});
    TruncationPolicy a = policy_eps(1e-9);
    a.max_k = 60;
    TruncationPolicy b = a;
    b.max_k = 120;
    auto on_hyperplane = {point2({0.5, 0}, {0.5, 0}), point2({2, 0}, {-1, 0}),
                          point2({0.3, 1.0}, {0.7, -1.0}), point2({1, 0}, {0.2, 0}),
                          point2({0.5, 0}, {-0.5, 0})};
    for (const auto& pt : on_hyperplane) {
        EvalResult ra = eval_continued(params, pt, a);
        EvalResult rb = eval_continued(params, pt, b);
        CHECK(std::isfinite(ra.value.real()));
        CHECK(std::abs(ra.value) < 1e3);
        CHECK(std::abs(ra.value - rb.value) <= 1e-8);
    }
    // bounded approach along a transversal to H_{2,2} (s1+s2 = 0)
    double prev = 0.0;
    for (double ep : {1e-2, 1e-3, 1e-4}) {
        EvalResult r = eval_continued(params, point2({0.5 + ep, 0}, {-0.5, 0}), a);
        CHECK(std::abs(r.value) < 1e3);
        prev = std::abs(r.value);
    }
    CHECK(prev > 0.0);
}

TEST_CASE("depth-3 evaluation: off-region, stable, pole-consistent") {
    TruncationPolicy pol = policy_eps(1e-8);
    auto params = hurwitz_of({0, 0, 0});
    EvalResult r = eval_continued(params, point3({-1, 0}, {0.5, 0}, {0.7, 0}), pol);
    CHECK(std::isfinite(r.value.real()));
    CHECK(r.error_bound <= 1e-8);

    TruncationPolicy wide = pol;
    wide.max_k = 400;
    EvalResult r2 = eval_continued(params, point3({-1, 0}, {0.5, 0}, {0.7, 0}), wide);
    CHECK(std::abs(r.value - r2.value) <= r.error_bound + r2.error_bound);

    // H_{1,0} Laurent limit ties depth 3 to a verified depth-2 value
    Complex inner = eval_continued(hurwitz_of({0, 0}), point2({2.5, 0}, {1.6, 0}), pol).value;
    for (double ep : {1e-4, 1e-5}) {
        EvalResult near = eval_continued(params, point3({1 + ep, 0}, {2.5, 0}, {1.6, 0}), pol);
        CHECK(std::abs(ep * near.value - inner) < 40 * ep);
    }
}

TEST_CASE("interior poles surface as pole-proximity errors") {
    TruncationPolicy pol = policy_eps(1e-8);
    // (2,0) lies on H_{2,0} of the multiple zeta function
    CHECK_THROWS_AS((void)eval_continued(hurwitz_of({0, 0}), point2({2, 0}, {0, 0}), pol),
                    EvalError);
    // exactly on a removable hyperplane the internal terms are polar
    try {
        (void)eval_continued(hurwitz_of({0, 0}), point2({4, 0}, {-5, 0}), pol);
        FAIL("expected pole-proximity from internal terms");
    } catch (const EvalError& e) {
        CHECK(e.cls() == ErrorClass::pole_proximity);
    }
}
