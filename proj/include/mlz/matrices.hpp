#pragma once

#include "mlz/bernoulli.hpp"
#include "mlz/core.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace mlz {

enum class MatrixKind { A1, A2, Delta, M, B, Product };

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// q x q upper-triangular slice of one of the transfer matrices. Entries are
// exact when Scalar is Rational.
template <typename Scalar>
struct TruncatedMatrix {
    int q = 0;
    MatrixKind kind = MatrixKind::Product;
    DenseMatrix<Scalar> entries;
};

namespace detail {

template <typename Scalar>
inline Scalar bernoulli_value(int k, const Scalar& d) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
        return bernoulli_poly(k).eval(d);
    } else {
        return bernoulli_poly(k).template eval_as<Scalar>(d);
    }
}

template <typename Scalar>
inline bool is_exactly_zero(const Scalar& v) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
        return v.is_zero();
    } else {
        return v == Scalar(0);
    }
}

} // namespace detail

// A1(t): entry (j, j+k) = (t+j)_k, the normalized Pochhammer.
// A2(d;t): entry (j, j+k) = d^k (t+j)_{k-1}.
// B(d;t):  entry (j, j)   = 1/(t+j),
//          entry (j, j+k) = B_k(d)/k! * prod_{u=1}^{k-1} (t+j+u) for k >= 1.
template <typename Scalar>
TruncatedMatrix<Scalar> build_matrix(MatrixKind kind, const Scalar& d, const Scalar& t, int q) {
    if (q < 1) throw std::invalid_argument("build_matrix: q must be >= 1");
    TruncatedMatrix<Scalar> out;
    out.q = q;
    out.kind = kind;
    out.entries = DenseMatrix<Scalar>::Constant(q, q, Scalar(0));

    std::vector<BernoulliPoly> bern;
    if (kind == MatrixKind::B) bern = bernoulli_polys(q - 1);

    for (int j = 0; j < q; ++j) {
        const Scalar tj = t + Scalar(j);
        switch (kind) {
            case MatrixKind::A1:
                for (int k = 0; j + k < q; ++k)
                    out.entries(j, j + k) = pochhammer(tj, k);
                break;
            case MatrixKind::A2: {
                Scalar dpow(1);
                for (int k = 0; j + k < q; ++k) {
                    out.entries(j, j + k) = dpow * pochhammer(tj, k - 1);
                    dpow = dpow * d;
                }
                break;
            }
            case MatrixKind::B: {
                if (detail::is_exactly_zero(tj))
                    throw EvalError(ErrorClass::pole_proximity,
                                    "build_matrix: singular diagonal 1/(t+j) at j = " + std::to_string(j));
                out.entries(j, j) = Scalar(1) / tj;
                Scalar prod(1);      // prod_{u=1}^{k-1} (t+j+u)
                Integer kfact(1);
                for (int k = 1; j + k < q; ++k) {
                    kfact *= k;
                    Scalar bk;
                    if constexpr (std::is_same_v<Scalar, Rational>) {
                        bk = bern[k].eval(d);
                    } else {
                        bk = bern[k].template eval_as<Scalar>(d);
                    }
                    out.entries(j, j + k) = bk * prod / detail::from_integer<Scalar>(kfact);
                    prod = prod * (tj + Scalar(k));
                }
                break;
            }
            case MatrixKind::Delta:
                out.entries(j, j) = tj;
                break;
            case MatrixKind::M:
                if (j + 1 < q) out.entries(j, j + 1) = tj;
                break;
            case MatrixKind::Product:
                throw std::invalid_argument("build_matrix: Product is not constructible");
        }
    }
    return out;
}

// Max-abs residual of A1(t) * B(d;t) - A2(d;t) over the leading q x q block;
// exactly zero in rational arithmetic.
template <typename Scalar>
auto verify_inverse_pair(const Scalar& d, const Scalar& t, int q) {
    auto a1 = build_matrix<Scalar>(MatrixKind::A1, d, t, q);
    auto a2 = build_matrix<Scalar>(MatrixKind::A2, d, t, q);
    auto b = build_matrix<Scalar>(MatrixKind::B, d, t, q);
    DenseMatrix<Scalar> resid = a1.entries * b.entries - a2.entries;
    if constexpr (std::is_same_v<Scalar, Rational>) {
        Rational worst(0);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
                worst = std::max(worst, abs(resid(i, j)));
        return worst;
    } else {
        double worst = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
                worst = std::max(worst, std::abs(resid(i, j)));
        return worst;
    }
}

// Residual of the commutation Delta(t) M(t+1) = M(t) Delta(t) on the leading
// block (exact zero for Rational).
template <typename Scalar>
auto commutation_residual(const Scalar& t, int q) {
    auto dl = build_matrix<Scalar>(MatrixKind::Delta, Scalar(0), t, q);
    auto m1 = build_matrix<Scalar>(MatrixKind::M, Scalar(0), t + Scalar(1), q);
    auto m0 = build_matrix<Scalar>(MatrixKind::M, Scalar(0), t, q);
    DenseMatrix<Scalar> resid = dl.entries * m1.entries - m0.entries * dl.entries;
    if constexpr (std::is_same_v<Scalar, Rational>) {
        Rational worst(0);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
                worst = std::max(worst, abs(resid(i, j)));
        return worst;
    } else {
        double worst = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
                worst = std::max(worst, std::abs(resid(i, j)));
        return worst;
    }
}

// (0,k) entry of prod_{d=1}^{i-1} B(alpha_{d+1} - alpha_d; t_d), computed on
// the (k+1) x (k+1) block, which suffices by triangularity.
template <typename Scalar>
Scalar first_row_chain(const std::vector<Scalar>& alphas, int i,
                       const std::vector<Scalar>& t_values, int k, int q_override = 0) {
    if (i < 2) throw std::invalid_argument("first_row_chain: i must be >= 2");
    if (static_cast<int>(t_values.size()) != i - 1)
        throw std::invalid_argument("first_row_chain: need exactly i-1 t-values");
    if (static_cast<int>(alphas.size()) < i)
        throw std::invalid_argument("first_row_chain: need at least i alphas");
    if (k < 0) throw std::invalid_argument("first_row_chain: k must be >= 0");
    const int q = q_override > 0 ? q_override : k + 1;
    if (q < k + 1) throw std::invalid_argument("first_row_chain: q must be >= k+1");

    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row;
    for (int d = 1; d <= i - 1; ++d) {
        const Scalar diff = alphas[d] - alphas[d - 1];
        auto b = build_matrix<Scalar>(MatrixKind::B, diff, t_values[d - 1], q);
        if (d == 1) {
            row = b.entries.row(0);
        } else {
            row = row * b.entries;
        }
    }
    return row(0, k);
}

// Closed form for the (0,k) entry of B(beta-alpha;x) B(gamma-beta;y):
// x (y+k) a_{0,k} = sum_{i=0}^{k} (x)_{i-1} (y+i+1)_{k-i-1} B_i(beta-alpha) B_{k-i}(gamma-beta).
template <typename Scalar>
Scalar two_prod_oracle(const Scalar& x, const Scalar& y,
                       const Scalar& alpha, const Scalar& beta, const Scalar& gamma, int k) {
    if (detail::is_exactly_zero(x))
        throw EvalError(ErrorClass::pole_proximity, "two_prod_oracle: x = 0");
    const Scalar yk = y + Scalar(k);
    if (detail::is_exactly_zero(yk))
        throw EvalError(ErrorClass::pole_proximity, "two_prod_oracle: y = -k");
    const Scalar dab = beta - alpha;
    const Scalar dbg = gamma - beta;
    Scalar acc(0);
    for (int i = 0; i <= k; ++i) {
        acc += pochhammer(x, i - 1) * pochhammer(y + Scalar(i + 1), k - i - 1) *
               detail::bernoulli_value<Scalar>(i, dab) * detail::bernoulli_value<Scalar>(k - i, dbg);
    }
    return acc / (x * yk);
}

} // namespace mlz
