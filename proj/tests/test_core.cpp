#include "mlz/core.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace mlz;
using namespace mlz::testing;

TEST_CASE("pochhammer matches the normalized convention") {
    CHECK(pochhammer(Complex(7.3, -2.0), -1) == Complex(1.0, 0.0));
    CHECK(pochhammer(Complex(1, 0), 7).real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pochhammer(Complex(2, 0), 2).real() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(pochhammer(Rational(2), 2) == Rational(4));
    CHECK(pochhammer(Rational(1), 11) == Rational(1));
}

TEST_CASE("pochhammer recurrence holds") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        Complex s(u(rng), u(rng));
        Complex prev = pochhammer(s, -1);
        for (int k = 0; k <= 12; ++k) {
            Complex cur = pochhammer(s, k);
            CHECK(std::abs(cur * static_cast<double>(k + 1) -
                           prev * (s + static_cast<double>(k))) < 1e-12 * (1.0 + std::abs(cur)));
            prev = cur;
        }
    }
}

TEST_CASE("unit twist") {
    CHECK(unit_twist(0.0) == Complex(1.0, 0.0));
    CHECK(std::abs(unit_twist(0.5) - Complex(-1.0, 0.0)) < 1e-15);
    CHECK(std::abs(unit_twist(0.25) - Complex(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(std::abs(unit_twist(0.1234567)) - 1.0) < 1e-15);
}

TEST_CASE("region index examples and boundary strictness") {
    CHECK(region_index(point2({2, 0}, {2, 0})).m == 0);
    CHECK(region_index(point1({0, 0})).m == 2);
    CHECK(region_index(point1({1, 0})).m == 1);   // on the boundary: open set, larger m
    CHECK(region_index(point1({1.0 + 1e-9, 0})).m == 0);
    CHECK(region_index(point2({3, 5}, {-2, 0})).m == 1);
}

TEST_CASE("region_index zero iff inside U_r") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXcd v(3);
        for (int i = 0; i < 3; ++i) v[i] = Complex(u(rng), u(rng));
        EvalPoint p(v);
        bool inside = true;
        double acc = 0;
        for (int i = 0; i < 3; ++i) {
            acc += v[i].real();
            if (!(acc > i + 1)) inside = false;
        }
        CHECK((region_index(p).m == 0) == inside);
    }
}

TEST_CASE("hyperplane offset examples") {
    CHECK(hyperplane_offset(point2({1, 0}, {3, 0}), Hyperplane(1, 0)) == Complex(0, 0));
    CHECK(hyperplane_offset(point2({2, 0}, {0, 0}), Hyperplane(2, 0)) == Complex(0, 0));
    CHECK(hyperplane_offset(point2({2, 0}, {1, 0}), Hyperplane(2, 1)) == Complex(2, 0));
}

TEST_CASE("hyperplane offset vanishes exactly on sampled points of H_{i,k}") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        Hyperplane h(1 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 5));
        Eigen::VectorXcd v(3);
        for (int i = 0; i < 3; ++i) v[i] = Complex(u(rng), u(rng));
        // project: force the first h.i coordinates to sum to i-k exactly
        Complex sum(0, 0);
        for (int i = 0; i < h.i - 1; ++i) sum += v[i];
        v[h.i - 1] = Complex(h.i - h.k, 0) - sum;
        CHECK(std::abs(hyperplane_offset(EvalPoint(v), h)) < 1e-12);
    }
}

TEST_CASE("EvalPoint shift bookkeeping gives exact memo keys") {
    EvalPoint p = point2({0.25, 1.5}, {2, 0});
    EvalPoint q = p.shifted_first(3);
    CHECK(q.coord(0) == Complex(3.25, 1.5));
    CHECK(q.base == p.base);
    CHECK(q.shift[0] == 3);
    CHECK(q.shifted_first(-3) == p);
    CHECK_FALSE(q == p);
}

TEST_CASE("TwistParams validates ranges and derives mus") {
    auto p = params_of({0.25, 0.5}, {0.0, 0.75});
    CHECK(p.mus[0] == doctest::Approx(0.25));
    CHECK(p.mus[1] == doctest::Approx(0.75));
    CHECK(p.mus[1] - p.mus[0] == doctest::Approx(p.lambdas[1]));
    CHECK_FALSE(p.is_hurwitz());
    CHECK(hurwitz_of({0.1, 0.2}).is_hurwitz());
    CHECK_THROWS_AS(params_of({1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(params_of({0.0}, {-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(params_of({0.0, 0.0}, {0.0}), std::invalid_argument);
}
