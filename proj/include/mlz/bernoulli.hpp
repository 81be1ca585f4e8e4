#pragma once

#include "mlz/core.hpp"
#include "mlz/rational.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace mlz {

using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

// B_n(t) with exact coefficients, coefficient of t^j at index j.
struct BernoulliPoly {
    int degree = 0;
    RationalVector coeffs;

    Rational eval(const Rational& t) const {
        Rational acc(0);
        for (int j = degree; j >= 0; --j) acc = acc * t + coeffs[j];
        return acc;
    }

    template <typename Scalar>
    Scalar eval_as(const Scalar& t) const {
        Scalar acc(0);
        for (int j = degree; j >= 0; --j) acc = acc * t + Scalar(coeffs[j].to_double());
        return acc;
    }
};

// B_0 .. B_N, exact, from the process-wide cache.
std::vector<BernoulliPoly> bernoulli_polys(int N);
BernoulliPoly bernoulli_poly(int n);
Rational bernoulli_number(int n);

Rational bernoulli_eval(int n, const Rational& t);
Complex bernoulli_eval(int n, Complex t);
double bernoulli_eval(int n, double t);

// K = { n : B_n(d) = 0 } for a fixed d in (-1,1). For rational d the set is
// exact (Inkeri); otherwise only a finite numeric scan is reported and no
// zero is ever claimed.
enum class ZeroSetKind { empty, odd_ge1, odd_ge3, numeric };

struct ZeroIndexSet {
    ZeroSetKind kind = ZeroSetKind::empty;
    std::vector<int> indeterminate;   // numeric scan: |B_n(d)| below threshold
    int nmax = 0;                     // numeric scan bound

    bool contains(int n) const {
        switch (kind) {
            case ZeroSetKind::empty: return false;
            case ZeroSetKind::odd_ge1: return n >= 1 && n % 2 == 1;
            case ZeroSetKind::odd_ge3: return n >= 3 && n % 2 == 1;
            case ZeroSetKind::numeric:
                for (int m : indeterminate)
                    if (m == n) return true;
                return false;
        }
        return false;
    }

    std::string describe() const;
};

ZeroIndexSet zero_index_set(const Rational& d, int nmax = 0);

// Numeric fallback for inexact d. Doubles that are dyadic rationals with a
// small denominator are routed to the exact path.
ZeroIndexSet zero_index_set_numeric(double d, int nmax, double threshold = 1e-12);

namespace detail {
template <typename Scalar>
inline Scalar from_integer(const Integer& n) { return Scalar(n.convert_to<double>()); }
template <>
inline Rational from_integer<Rational>(const Integer& n) { return Rational(n); }
} // namespace detail

// P_0(a,c) .. P_N(a,c) from e^{ax}/(e^x - c) = sum P_n(a,c) x^n / n!, c != 1.
template <typename Scalar>
std::vector<Scalar> apostol_polys(int N, const Scalar& a, const Scalar& c) {
    if (c == Scalar(1)) throw EvalError(ErrorClass::usage, "apostol_polys: c = 1 is excluded");
    std::vector<Scalar> P(N + 1);
    const Scalar one_minus_c = Scalar(1) - c;
    P[0] = Scalar(1) / one_minus_c;
    Scalar apow(1);
    for (int n = 1; n <= N; ++n) {
        apow = apow * a;
        Scalar acc = apow;
        for (int j = 0; j < n; ++j)
            acc = acc - detail::from_integer<Scalar>(binomial(n, j)) * P[j];
        P[n] = acc / one_minus_c;
    }
    return P;
}

std::vector<Complex> apostol_polys(int N, double a, Complex c);
std::vector<Rational> apostol_polys_exact(int N, const Rational& a, const Rational& c);

// Polynomial helpers over the rationals (dense coefficient vectors, degree =
// size-1 after trimming).
RationalVector poly_derivative(const RationalVector& p);
RationalVector poly_shift_by_one(const RationalVector& p);        // p(t+1)
RationalVector poly_compose_one_minus(const RationalVector& p);   // p(1-t)
RationalVector poly_gcd(const RationalVector& a, const RationalVector& b);
int poly_degree(const RationalVector& p);

// All rational roots of B_n by exhaustive rational-root-theorem candidates.
std::vector<Rational> bernoulli_rational_roots(int n);

} // namespace mlz
