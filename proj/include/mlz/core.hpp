#pragma once

#include "mlz/rational.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlz {

using Complex = std::complex<double>;

enum class ErrorClass {
    usage,
    pole_proximity,
    accuracy,
    region,
    off_hyperplane,
    unsupported_lerch,
    conditioning,
};

class EvalError : public std::runtime_error {
public:
    EvalError(ErrorClass cls, const std::string& what, double achieved_bound = -1.0)
        : std::runtime_error(what), cls_(cls), achieved_bound_(achieved_bound) {}

    ErrorClass cls() const { return cls_; }
    // Achieved error bound at the failure point, when one is known (accuracy errors).
    double achieved_bound() const { return achieved_bound_; }

private:
    ErrorClass cls_;
    double achieved_bound_;
};

// Parameter tuple (lambda_1..lambda_r; alpha_1..alpha_r) of one multiple
// Lerch function, with the cumulative twists mu_i = lambda_1 + ... + lambda_i.
// Entries parsed from exact fractions keep an exact rational mirror so the
// classifier and matrix kit can make exact zero/integer decisions.
struct TwistParams {
    int depth = 0;
    Eigen::VectorXd lambdas;
    Eigen::VectorXd alphas;
    Eigen::VectorXd mus;
    std::vector<std::optional<Rational>> lambdas_exact;
    std::vector<std::optional<Rational>> alphas_exact;

    TwistParams() = default;

    TwistParams(Eigen::VectorXd lam, Eigen::VectorXd alp,
                std::vector<std::optional<Rational>> lam_exact = {},
                std::vector<std::optional<Rational>> alp_exact = {})
        : depth(static_cast<int>(lam.size())),
          lambdas(std::move(lam)),
          alphas(std::move(alp)),
          lambdas_exact(std::move(lam_exact)),
          alphas_exact(std::move(alp_exact)) {
        if (depth < 1) throw std::invalid_argument("TwistParams: depth must be >= 1");
        if (alphas.size() != depth) throw std::invalid_argument("TwistParams: lambda/alpha length mismatch");
        for (int i = 0; i < depth; ++i) {
            if (!(lambdas[i] >= 0.0 && lambdas[i] < 1.0))
                throw std::invalid_argument("TwistParams: lambda entries must lie in [0,1)");
            if (!(alphas[i] >= 0.0 && alphas[i] < 1.0))
                throw std::invalid_argument("TwistParams: alpha entries must lie in [0,1)");
        }
        if (lambdas_exact.empty()) lambdas_exact.resize(depth);
        if (alphas_exact.empty()) alphas_exact.resize(depth);
        if (static_cast<int>(lambdas_exact.size()) != depth ||
            static_cast<int>(alphas_exact.size()) != depth)
            throw std::invalid_argument("TwistParams: exact mirror length mismatch");
        mus.resize(depth);
        double acc = 0.0;
        for (int i = 0; i < depth; ++i) {
            acc += lambdas[i];
            mus[i] = acc;
        }
    }

    static TwistParams hurwitz(Eigen::VectorXd alp) {
        Eigen::VectorXd lam = Eigen::VectorXd::Zero(alp.size());
        return TwistParams(std::move(lam), std::move(alp));
    }

    bool is_hurwitz() const {
        for (int i = 0; i < depth; ++i)
            if (lambdas[i] != 0.0) return false;
        return true;
    }
};

// A point of C^r stored as base + integer shift. Continuation only ever adds
// integers to the first coordinate or collapses s1+s2, so recursion-generated
// points have exact, hashable identities.
struct EvalPoint {
    Eigen::VectorXcd base;
    Eigen::VectorXi shift;

    EvalPoint() = default;
    explicit EvalPoint(Eigen::VectorXcd b)
        : base(std::move(b)), shift(Eigen::VectorXi::Zero(base.size())) {}
    EvalPoint(Eigen::VectorXcd b, Eigen::VectorXi sh) : base(std::move(b)), shift(std::move(sh)) {
        if (base.size() != shift.size())
            throw std::invalid_argument("EvalPoint: base/shift length mismatch");
    }

    int dim() const { return static_cast<int>(base.size()); }

    Complex coord(int i) const { return base[i] + static_cast<double>(shift[i]); }

    Eigen::VectorXcd value() const {
        Eigen::VectorXcd v = base;
        for (int i = 0; i < dim(); ++i) v[i] += static_cast<double>(shift[i]);
        return v;
    }

    EvalPoint shifted_first(int k) const {
        EvalPoint p = *this;
        p.shift[0] += k;
        return p;
    }

    friend bool operator==(const EvalPoint& a, const EvalPoint& b) {
        return a.base == b.base && a.shift == b.shift;
    }
};

// Names H_{i,k}: s_1 + ... + s_i = i - k.
struct Hyperplane {
    int i = 1;
    int k = 0;

    Hyperplane() = default;
    Hyperplane(int i_, int k_) : i(i_), k(k_) {
        if (i < 1) throw std::invalid_argument("Hyperplane: i must be >= 1");
        if (k < 0) throw std::invalid_argument("Hyperplane: k must be >= 0");
    }

    friend bool operator==(const Hyperplane& a, const Hyperplane& b) {
        return a.i == b.i && a.k == b.k;
    }
};

// Names U_r(m): Re(s_1+...+s_i) > i - m for all i. U_r(0) = U_r.
struct RegionIndex {
    int m = 0;
};

// Normalized Pochhammer (s)_k = s(s+1)...(s+k)/(k+1)!, with (s)_{-1} = 1.
inline Complex pochhammer(Complex s, int k) {
    if (k < -1) throw std::invalid_argument("pochhammer: k must be >= -1");
    Complex acc(1.0, 0.0);
    for (int j = 0; j <= k; ++j) acc *= (s + static_cast<double>(j)) / static_cast<double>(j + 1);
    return acc;
}

inline Rational pochhammer(const Rational& s, int k) {
    if (k < -1) throw std::invalid_argument("pochhammer: k must be >= -1");
    Rational acc(1);
    for (int j = 0; j <= k; ++j) acc *= (s + Rational(j)) / Rational(j + 1);
    return acc;
}

// e(a) = exp(2 pi i a).
inline Complex unit_twist(double a) {
    const double t = 2.0 * std::numbers::pi * a;
    return Complex(std::cos(t), std::sin(t));
}

inline Eigen::VectorXd partial_re_sums(const EvalPoint& s) {
    Eigen::VectorXd out(s.dim());
    double acc = 0.0;
    for (int i = 0; i < s.dim(); ++i) {
        acc += s.coord(i).real();
        out[i] = acc;
    }
    return out;
}

// Smallest margin of s over the U_r boundary: min_i (Re(s_1+...+s_i) - i).
inline double region_margin(const EvalPoint& s) {
    Eigen::VectorXd ps = partial_re_sums(s);
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ps.size(); ++i) m = std::min(m, ps[i] - (i + 1));
    return m;
}

// Smallest m >= 0 with s in U_r(m). Points exactly on a boundary get the
// larger m; the U_r(m) are open.
inline RegionIndex region_index(const EvalPoint& s) {
    Eigen::VectorXd ps = partial_re_sums(s);
    int m = 0;
    for (int i = 0; i < ps.size(); ++i) {
        int mi = static_cast<int>(std::floor((i + 1) - ps[i])) + 1;
        m = std::max(m, mi);
    }
    return RegionIndex{m};
}

// s_1 + ... + s_i - (i - k); zero exactly when s lies on H_{i,k}.
inline Complex hyperplane_offset(const EvalPoint& s, const Hyperplane& h) {
    if (h.i > s.dim()) throw std::invalid_argument("hyperplane_offset: h.i exceeds depth");
    Complex acc(0.0, 0.0);
    for (int i = 0; i < h.i; ++i) acc += s.coord(i);
    return acc - static_cast<double>(h.i - h.k);
}

} // namespace mlz
