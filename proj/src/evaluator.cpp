#include "mlz/evaluator.hpp"

#include "mlz/bernoulli.hpp"
#include "mlz/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

namespace mlz {

namespace {

constexpr double kMachEps = 2.220446049250313e-16;
constexpr double kInf = std::numeric_limits<double>::infinity();

// (n+alpha)^{-s} with the real logarithm of the positive real base.
inline Complex cpow_neg(double base, Complex s) {
    const double l = std::log(base);
    return std::exp(Complex(-s.real() * l, -s.imag() * l));
}

inline double rpow_neg(double base, double sigma) { return std::exp(-sigma * std::log(base)); }

// int_N^inf (x+a)^e dx for e < -1.
inline double pow_tail(double a, double e, double N) {
    return std::pow(N + a, e + 1.0) / (-e - 1.0);
}

// int_N^inf (x+a)^e ln(x+a) dx for e < -1.
inline double powlog_tail(double a, double e, double N) {
    const double ep1 = e + 1.0;
    const double b = N + a;
    return std::pow(b, ep1) * (std::log(b) / (-ep1) + 1.0 / (ep1 * ep1));
}

// int_N^inf (x+a)^e ln^2(x+a) dx for e < -1.
inline double powlog2_tail(double a, double e, double N) {
    const double ep1 = e + 1.0;
    const double b = N + a;
    const double l = std::log(b);
    return std::pow(b, ep1) / (-ep1) * (l * l + 2.0 * l / (-ep1) + 2.0 / (ep1 * ep1));
}

struct Interval {
    double lo = 0.0, hi = 0.0;
    Interval() = default;
    Interval(double a, double b) : lo(std::min(a, b)), hi(std::max(a, b)) {}
    double mid() const { return 0.5 * (lo + hi); }
    double rad() const { return 0.5 * (hi - lo); }
    Interval operator+(const Interval& o) const { return make(lo + o.lo, hi + o.hi); }
    Interval operator-(const Interval& o) const { return make(lo - o.hi, hi - o.lo); }
    Interval scaled(double c) const { return c >= 0 ? make(c * lo, c * hi) : make(c * hi, c * lo); }
    static Interval make(double a, double b) {
        Interval v;
        v.lo = a;
        v.hi = b;
        return v;
    }
    static Interval hull(double a, double b) { return Interval(a, b); }
};

// Growth exponent of the absolute inner DP sum, from the inner exponents.
double growth_exponent(const std::vector<double>& sigma) {
    double g = 0.0;
    for (int i = static_cast<int>(sigma.size()) - 1; i >= 1; --i) {
        const double e = g - sigma[i];
        if (e + 1.0 > 0.05)
            g = e + 1.0;
        else if (std::abs(e + 1.0) <= 0.05)
            g = 0.1;   // near-harmonic level, log growth majorized by a small power
        else
            g = 0.0;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Two-sided tail for real Hurwitz direct sums of depth <= 2. Returns the
// enclosure of sum_{n>N} f_1(n) * D_2(n-1) (depth 2) or sum_{n>N} f_1(n)
// (depth 1), from iterated integral comparison.
// ---------------------------------------------------------------------------

Interval tail_interval_depth1(double s1, double a1, double N) {
    return Interval(pow_tail(a1, -s1, N + 1.0), pow_tail(a1, -s1, N));
}

// Antiderivative of (x+a2)^{-s2}: Phi(x) = (x+a2)^{1-s2}/(1-s2) or ln(x+a2).
struct Phi {
    double a2, s2;
    bool logform;
    double operator()(double x) const {
        return logform ? std::log(x + a2) : std::pow(x + a2, 1.0 - s2) / (1.0 - s2);
    }
};

// Interval of sum_{n>N} (n+a1)^{-s1} * Phi(n-1+shift) via base alignment.
Interval phi_cross_sum(double s1, double a1, const Phi& phi, double shift, double N) {
    auto integral_from = [&](double M) -> Interval {
        const double c = shift - 1.0 + phi.a2;
        const double rho = (M + c) / (M + a1);
        if (phi.logform) {
            const double dl = std::log(rho);
            Interval delta = Interval(0.0, dl);
            const double base = powlog_tail(a1, -s1, M);
            const double p0 = pow_tail(a1, -s1, M);
            return Interval(base + delta.lo * p0, base + delta.hi * p0);
        }
        const double e = 1.0 - phi.s2;
        const double scale = 1.0 / (1.0 - phi.s2);
        Interval fudge = Interval(std::pow(rho, e), 1.0);
        const double p0 = pow_tail(a1, -s1 + e, M);
        Interval f = Interval(fudge.lo * p0, fudge.hi * p0);
        return f.scaled(scale);
    };
    Interval iN = integral_from(N);
    Interval iN1 = integral_from(N + 1.0);
    return Interval(std::min(iN.lo, iN1.lo), std::max(iN.hi, iN1.hi));
}

Interval tail_interval_depth2(double s1, double a1, double s2, double a2, double N, double d2N) {
    Interval S0 = tail_interval_depth1(s1, a1, N);

    const bool near1 = std::abs(1.0 - s2) < 1e-6;
    Phi phi{a2, s2, near1};

    // Increment envelopes of D_2(m) - D_2(N) for m >= N: Phi(m+a)-Phi(N+a),
    // with a in {0,1} ordered by the monotonicity of (x+a2)^{-s2}.
    double a_hi, a_lo;
    if (s2 >= 0.0) {
        a_hi = 0.0;
        a_lo = 1.0;
    } else {
        a_hi = 1.0;
        a_lo = 0.0;
    }

    // side(a) = X(a) - Phi(N+a) * S0, as an interval.
    auto side_iv = [&](double a) -> Interval {
        Interval x = phi_cross_sum(s1, a1, phi, a, N);
        const double c = phi(N + a);
        Interval cS0 = S0.scaled(c);
        return x - cS0;
    };

    Interval inc_hi = side_iv(a_hi);
    Interval inc_lo = side_iv(a_lo);

    double t_hi = d2N * S0.hi + inc_hi.hi;
    double t_lo = d2N * S0.lo + inc_lo.lo;

    Interval out = Interval(t_lo, t_hi);
    if (near1) {
        // Widen for treating s2 as exactly 1.
        const double widen = std::abs(1.0 - s2) * powlog2_tail(a1, -s1, N) * 2.0;
        out = Interval(out.lo - widen, out.hi + widen);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Streaming nested direct summation. The outer coordinate may carry a block
// of integer shifts evaluated simultaneously (one divide chain per shift).
// ---------------------------------------------------------------------------

struct DirectSpec {
    std::vector<Complex> s;
    std::vector<double> lambda;
    std::vector<double> alpha;

    int depth() const { return static_cast<int>(s.size()); }
    bool real_hurwitz() const {
        for (double l : lambda)
            if (l != 0.0) return false;
        for (const Complex& v : s)
            if (v.imag() != 0.0) return false;
        return true;
    }
    double margin() const {
        double acc = 0.0, m = kInf;
        for (int i = 0; i < depth(); ++i) {
            acc += s[i].real();
            m = std::min(m, acc - (i + 1));
        }
        return m;
    }
};

struct ColumnOutcome {
    bool ok = false;
    std::vector<Complex> values;
    std::vector<double> bounds;
    long long updates = 0;
};

// Predicted cutoff for the plain one-sided tail bound to reach eps.
double predict_direct_cutoff(const DirectSpec& spec, double eps) {
    std::vector<double> sig(spec.depth());
    for (int i = 0; i < spec.depth(); ++i) sig[i] = spec.s[i].real();
    if (spec.depth() == 1 && spec.lambda[0] != 0.0 && sig[0] > 0.2) {
        const double dirichlet = 2.0 / std::abs(Complex(1.0, 0.0) - unit_twist(spec.lambda[0]));
        return std::pow(dirichlet / eps, 1.0 / sig[0]);
    }
    const double p = growth_exponent(sig);
    const double gap = sig[0] - p - 1.0;
    if (gap < 0.1) return kInf;
    const double safety = 2.0 * std::max(1.0, std::pow(2.0, -sig[0]));
    const double aguess = std::pow(4.0, spec.depth());
    return std::pow(safety * aguess / (eps * gap), 1.0 / gap);
}

ColumnOutcome direct_column(const DirectSpec& spec, int nshift, double eps_target,
                            double max_updates) {
    const int r = spec.depth();
    std::vector<double> sig(r);
    for (int i = 0; i < r; ++i) sig[i] = spec.s[i].real();
    const double p = growth_exponent(sig);

    ColumnOutcome out;
    out.values.assign(nshift, Complex(0.0, 0.0));
    out.bounds.assign(nshift, kInf);

    const double gap0 = sig[0] - p - 1.0;
    if (gap0 < 0.05) return out;

    const bool two_sided = spec.real_hurwitz() && r <= 2;

    // DP state: D[i] = sum over tuples with n_i <= current n, level i inner.
    std::vector<Complex> D(r + 1, Complex(0, 0)), comp(r + 1, Complex(0, 0));
    std::vector<double> A(r + 1, 0.0);
    D[r] = Complex(1.0, 0.0);
    A[r] = 1.0;

    std::vector<Complex> acc0(nshift, Complex(0, 0)), comp0(nshift, Complex(0, 0));
    std::vector<double> abs0(nshift, 0.0);

    std::vector<Complex> rot(r), step(r);
    for (int i = 0; i < r; ++i) {
        step[i] = unit_twist(spec.lambda[i]);
        rot[i] = step[i];
    }

    auto kahan_add = [](Complex& sum, Complex& c, Complex term) {
        Complex y = term - c;
        Complex t = sum + y;
        c = (t - sum) - y;
        sum = t;
    };

    long long next_check = 64;
    const double safety = 2.0 * std::max(1.0, std::pow(2.0, -sig[0]));
    // Depth-1 twisted sums admit the Dirichlet-test tail bound
    // |sum_{n>N} e(ln) h(n)| <= 2 h(N+1)/|1-e(l)| for h positive decreasing.
    const double dirichlet =
        (r == 1 && spec.lambda[0] != 0.0)
            ? 2.0 / std::abs(Complex(1.0, 0.0) - unit_twist(spec.lambda[0]))
            : 0.0;

    for (long long n = 1;; ++n) {
        // Outer level first: uses D[1] in its state for n-1.
        {
            const double base = static_cast<double>(n) + spec.alpha[0];
            const Complex f1 = rot[0] * cpow_neg(base, spec.s[0]);
            const double af1 = rpow_neg(base, sig[0]);
            const double w = 1.0 / base;
            Complex fj = f1;
            double afj = af1;
            const Complex inner = (r >= 2) ? D[1] : Complex(1.0, 0.0);
            const double ainner = (r >= 2) ? A[1] : 1.0;
            for (int j = 0; j < nshift; ++j) {
                kahan_add(acc0[j], comp0[j], fj * inner);
                abs0[j] += afj * ainner;
                fj *= w;
                afj *= w;
            }
        }
        // Inner levels ascending: level i uses D[i+1] still at state n-1.
        for (int i = 1; i < r; ++i) {
            const double base = static_cast<double>(n) + spec.alpha[i];
            const Complex fi = rot[i] * cpow_neg(base, spec.s[i]);
            kahan_add(D[i], comp[i], fi * D[i + 1]);
            A[i] += rpow_neg(base, sig[i]) * A[i + 1];
        }
        for (int i = 0; i < r; ++i) rot[i] *= step[i];
        if ((n & 511) == 0)
            for (int i = 0; i < r; ++i) rot[i] /= std::abs(rot[i]);

        out.updates += r;

        if (n == next_check || out.updates >= max_updates) {
            const double N = static_cast<double>(n);
            const double a1v = (r >= 2) ? A[1] : 1.0;
            bool all_ok = true;
            for (int j = 0; j < nshift; ++j) {
                const double sj = sig[0] + j;
                const double gap = sj - p - 1.0;
                double rounding = kMachEps * (8.0 * abs0[j] + 4.0);
                if (two_sided) {
                    Interval t = (r == 1)
                                     ? tail_interval_depth1(sj, spec.alpha[0], N)
                                     : tail_interval_depth2(sj, spec.alpha[0], sig[1],
                                                            spec.alpha[1], N, D[1].real());
                    out.values[j] = acc0[j] + Complex(t.mid(), 0.0);
                    out.bounds[j] = t.rad() + rounding;
                } else if (dirichlet > 0.0 && sig[0] > 0.0) {
                    out.values[j] = acc0[j];
                    out.bounds[j] =
                        dirichlet * rpow_neg(N + 1.0 + spec.alpha[0], sj) + rounding;
                } else {
                    out.values[j] = acc0[j];
                    out.bounds[j] = safety * a1v * std::pow(N, 1.0 - sj) / gap + rounding;
                }
                if (out.bounds[j] > eps_target) all_ok = false;
            }
            if (all_ok) {
                out.ok = true;
                return out;
            }
            if (out.updates >= max_updates) return out;   // achieved bounds reported
            // Extrapolate the cutoff needed for the shallowest entry; bail
            // early when it exceeds the budget.
            if (out.bounds[0] > eps_target) {
                double e_est = dirichlet > 0.0 ? sig[0]
                               : two_sided     ? (r == 1 ? sig[0] : gap0 + 1.0)
                                               : gap0;
                e_est = std::max(e_est, 0.3);
                const double n_req = N * std::pow(out.bounds[0] / eps_target, 1.0 / e_est);
                if (n_req * r > 1.3 * max_updates) return out;
            }
            next_check *= 2;
        }
    }
}

// ---------------------------------------------------------------------------
// Continuation engine: memoized shift columns per collapse level, driven by
// the generalized Ramanujan identities.
// ---------------------------------------------------------------------------

double wrap_unit(double x, double snap = 1e-12) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;
    if (f <= snap || f >= 1.0 - snap) f = 0.0;   // snap collapsed twists to the Hurwitz branch
    return f;
}

class Engine {
public:
    Engine(const TwistParams& params, const EvalPoint& s, const TruncationPolicy& policy,
           int nest = 0)
        : policy_(policy), nest_(nest), origin_(s) {
        policy_.validate();
        if (params.depth != s.dim())
            throw EvalError(ErrorClass::usage, "eval: point dimension does not match depth");
        build_levels(params, s);
        precheck_poles(params, s);
    }

    EvalResult run() {
        constexpr double kEpsFloor = 2.5e-13;
        double eps_work = policy_.eps / 4.0;
        EvalResult res;
        for (int attempt = 0; attempt < 3; ++attempt) {
            clear_memos();
            eps_work_ = std::max(eps_work, kEpsFloor);
            direct_budget_ = std::min(static_cast<double>(1 << (17 + 3 * attempt)),
                                      policy_.max_terms);
            res = value(0, 0, 0);
            res.region_index = region_index(origin_).m;
            res.diagnostics = diag_;
            if (res.error_bound <= policy_.eps) return res;
            if (eps_work <= kEpsFloor && attempt >= 1) break;
            eps_work /= 64.0;
        }
        throw EvalError(ErrorClass::accuracy,
                        "eval_continued: propagated error bound " + std::to_string(res.error_bound) +
                            " exceeds eps",
                        res.error_bound);
    }

private:
    struct Level {
        int depth = 0;
        Complex base_first{0, 0};
        std::vector<Complex> rest;
        double lam_head = 0.0;
        std::vector<double> lam_rest;
        std::vector<double> alphas;
        Complex e_head{1, 0};
        bool head_is_hurwitz = true;
        std::unordered_map<long long, EvalResult> memo;
        std::unordered_map<long long, EvalResult> tmemo;   // depth-1 tail values
        std::optional<EvalResult> tail_residue;
        double direct_fail_sigma = -kInf;   // direct summation failed here or shallower
        double tail_fail_sigma = -kInf;
    };

    TruncationPolicy policy_;
    int nest_;
    EvalPoint origin_;
    std::vector<Level> levels_;
    Diagnostics diag_;
    double eps_work_ = 1e-12;
    double direct_budget_ = 1 << 17;

    void build_levels(const TwistParams& params, const EvalPoint& s) {
        const int r = params.depth;
        levels_.resize(r);
        Complex acc(0, 0);
        for (int j = 0; j < r; ++j) {
            acc += s.coord(j);
            Level& L = levels_[j];
            L.depth = r - j;
            L.base_first = acc;
            L.rest.assign(0, Complex());
            for (int i = j + 1; i < r; ++i) L.rest.push_back(s.coord(i));
            L.lam_head = wrap_unit(params.mus[j]);
            for (int i = j + 1; i < r; ++i) L.lam_rest.push_back(params.lambdas[i]);
            L.alphas.assign(params.alphas.data() + j, params.alphas.data() + r);
            L.e_head = unit_twist(L.lam_head);
            L.head_is_hurwitz = L.lam_head == 0.0;
        }
    }

    void precheck_poles(const TwistParams& params, const EvalPoint& s) {
        SingularityReport rep = params.is_hurwitz() ? classify_hurwitz(params)
                                                    : classify_lerch(params);
        if (rep.status == SingularityReport::Status::entire) return;
        for (const auto& fam : rep.families) {
            if (fam.certainty == Certainty::removable) continue;
            Complex u(0, 0);
            for (int i = 0; i < fam.i; ++i) u += s.coord(i);
            if (std::abs(u.imag()) > policy_.pole_tolerance) continue;
            const int kstar = static_cast<int>(std::lround(fam.i - u.real()));
            if (kstar < 0 || !fam.k_set.contains(kstar)) continue;
            const double off = std::abs(u - Complex(fam.i - kstar, 0.0));
            if (off <= policy_.pole_tolerance)
                throw EvalError(ErrorClass::pole_proximity,
                                "eval: point within pole tolerance of hyperplane H_{" +
                                    std::to_string(fam.i) + "," + std::to_string(kstar) + "}");
        }
    }

    void clear_memos() {
        for (auto& L : levels_) {
            L.memo.clear();
            L.tmemo.clear();
            L.tail_residue.reset();
            L.direct_fail_sigma = -kInf;
            L.tail_fail_sigma = -kInf;
        }
    }

    DirectSpec level_spec(int j, long long shift) const {
        const Level& L = levels_[j];
        DirectSpec spec;
        spec.s.push_back(L.base_first + static_cast<double>(shift));
        for (const auto& c : L.rest) spec.s.push_back(c);
        spec.lambda.push_back(L.lam_head);
        for (double l : L.lam_rest) spec.lambda.push_back(l);
        spec.alpha = L.alphas;
        return spec;
    }

    // Residue of the level-j function along its H_{1,0}: the depth-(r-1)
    // function of the remaining coordinates. Constant along the shift column.
    EvalResult tail_residue(int j) {
        Level& L = levels_[j];
        if (L.tail_residue) return *L.tail_residue;
        if (L.depth == 1) {
            EvalResult unit;
            unit.value = Complex(1.0, 0.0);
            L.tail_residue = unit;
            return unit;
        }
        Eigen::VectorXd lam(L.depth - 1), alp(L.depth - 1);
        Eigen::VectorXcd pt(L.depth - 1);
        for (int i = 0; i < L.depth - 1; ++i) {
            lam[i] = L.lam_rest[i];
            alp[i] = L.alphas[i + 1];
            pt[i] = L.rest[i];
        }
        TwistParams sub(lam, alp);
        TruncationPolicy sp = policy_;
        sp.eps = std::max(eps_work_ * 0.25, 1e-14);
        Engine e(sub, EvalPoint(pt), sp, nest_ + 1);
        EvalResult res = e.run();
        L.tail_residue = res;
        return res;
    }

    EvalResult value(int j, long long shift, int rec) {
        if (rec > 4000)
            throw EvalError(ErrorClass::accuracy,
                            "eval_continued: recursion guard tripped (column too long)");
        Level& L = levels_[j];
        if (auto it = L.memo.find(shift); it != L.memo.end()) {
            ++diag_.cache_hits;
            return it->second;
        }
        diag_.recursion_depth = std::max(diag_.recursion_depth, rec);
        ++diag_.evaluations;

        EvalResult res = (L.depth == 1) ? depth1_value(j, shift, rec)
                                        : depthr_value(j, shift, rec);
        L.memo.emplace(shift, res);
        return res;
    }

    EvalResult depthr_value(int j, long long shift, int rec) {
        Level& L = levels_[j];
        const Complex first = L.base_first + static_cast<double>(shift);
        DirectSpec spec = level_spec(j, shift);

        const double margin = spec.margin();
        const double eps_term = eps_work_ / 16.0;
        const double sigma0 = spec.s[0].real();
        if (margin >= policy_.direct_cutoff_margin && sigma0 > L.direct_fail_sigma) {
            // Prefer the shallowest direct fill whose achieved bound is
            // acceptable: deeper fills tighten leaves but lengthen the
            // back-substitution chain, which inflates the propagated bound.
            if (predict_direct_cutoff(spec, eps_work_) <= direct_budget_) {
                ColumnOutcome c =
                    direct_column(spec, 1, eps_term, direct_budget_ * spec.depth());
                diag_.terms_summed += c.updates;
                if (c.bounds[0] <= eps_work_) {
                    EvalResult res;
                    res.value = c.values[0];
                    res.error_bound = c.bounds[0];
                    return res;
                }
                L.direct_fail_sigma = std::max(L.direct_fail_sigma, sigma0);
            }
        }
        return L.head_is_hurwitz ? identity22(j, shift, first, rec)
                                 : identity21(j, shift, first, rec);
    }

    // lambda_1 = 0 branch:
    // (s1-1) L_r(s) = sum_{k>=-1} (s1-1)_k d^{k+1} L_{r-1}(s1+s2+k, ...)
    //               - sum_{k>=1} (s1-1)_k L_r(s1+k, s2, ...).
    EvalResult identity22(int j, long long shift, Complex first, int rec) {
        Level& L = levels_[j];
        const Complex divisor = first - 1.0;
        if (std::abs(divisor) < policy_.pole_tolerance)
            throw EvalError(ErrorClass::pole_proximity,
                            "eval: continuation hits the depth-" + std::to_string(L.depth) +
                                " hyperplane H_{1,0} at an internal shift");

        const double d = L.alphas[1] - L.alphas[0];
        const double eps_tail = eps_work_ / 16.0;

        Complex left(0, 0);
        double left_err = 0.0, left_abs = 0.0;
        if (d == 0.0) {
            // Only k = -1 survives; (alpha2-alpha1)^0 = 1 there.
            EvalResult in = value(j + 1, shift - 1, rec + 1);
            left = in.value;
            left_err = in.error_bound;
            left_abs = std::abs(in.value);
        } else {
            Complex pk(1.0, 0.0);   // (first-1)_k, starting at k = -1
            double dpow = 1.0;      // d^{k+1}
            double prev_abs = kInf;
            const double decay = std::abs(d) / (L.depth - 1 + L.alphas[1]);
            for (int k = -1; k <= policy_.max_k; ++k) {
                if (k >= 0) {
                    pk *= (first - 1.0 + static_cast<double>(k)) / static_cast<double>(k + 1);
                    dpow *= d;
                }
                const Complex coeff = pk * dpow;
                if (k >= 0 && coeff == Complex(0.0, 0.0)) break;
                EvalResult in = value(j + 1, shift + k, rec + 1);
                const Complex term = coeff * in.value;
                left += term;
                left_err += std::abs(coeff) * in.error_bound;
                left_abs += std::abs(term);
                const double ratio =
                    std::abs(first + static_cast<double>(k)) / (k + 2) * decay;
                const double scale = std::max(std::abs(term), prev_abs * ratio);
                if (k >= 2 && ratio < 0.9 && 2.0 * scale * ratio / (1.0 - ratio) < eps_tail) {
                    left_err += 2.0 * scale * ratio / (1.0 - ratio);
                    break;
                }
                if (k == policy_.max_k)
                    left_err += std::abs(term) + scale;
                prev_abs = std::abs(term);
            }
        }

        Complex right(0, 0);
        double right_err = 0.0, right_abs = 0.0;
        {
            Complex pk = divisor;   // (first-1)_0
            double prev_abs = kInf;
            const double decay = 1.0 / (L.depth + L.alphas[0]);
            for (int k = 1; k <= policy_.max_k; ++k) {
                pk *= (first - 1.0 + static_cast<double>(k)) / static_cast<double>(k + 1);
                const Complex arg = first + static_cast<double>(k);
                if (std::abs(arg - 1.0) <= policy_.pole_tolerance) {
                    // (first-1)_k vanishes where the shifted function meets its
                    // H_{1,0}; the product tends to (-1)^k/(k+1) * residue.
                    EvalResult R = tail_residue(j);
                    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
                    const Complex lim = sgn / (k + 1.0) * R.value;
                    right += lim;
                    right_err += R.error_bound / (k + 1.0) +
                                 std::abs(arg - 1.0) * 4.0 * (1.0 + std::abs(R.value));
                    right_abs += std::abs(lim);
                    prev_abs = std::abs(lim);
                    continue;
                }
                if (pk == Complex(0.0, 0.0)) break;
                EvalResult in = value(j, shift + k, rec + 1);
                const Complex term = pk * in.value;
                right += term;
                right_err += std::abs(pk) * in.error_bound;
                right_abs += std::abs(term);
                const double ratio =
                    std::abs(first + static_cast<double>(k)) / (k + 2) * decay;
                const double scale = std::max(std::abs(term), prev_abs * ratio);
                if (k >= 4 && ratio < 0.9 && 2.0 * scale * ratio / (1.0 - ratio) < eps_tail) {
                    right_err += 2.0 * scale * ratio / (1.0 - ratio);
                    break;
                }
                if (k == policy_.max_k)
                    right_err += std::abs(term) + scale;
                prev_abs = std::abs(term);
            }
        }

        EvalResult res;
        res.value = (left - right) / divisor;
        res.error_bound = (left_err + right_err + 8.0 * kMachEps * (left_abs + right_abs)) /
                          std::abs(divisor);
        return res;
    }

    // lambda_1 != 0 branch:
    // (1-e(l1)) L_r(s) = e(l1) sum_{k>=-1} (s1)_k d^{k+1} L_{r-1}(s1+s2+k+1, ...)
    //                  - sum_{k>=0} (s1)_k L_r(s1+k+1, s2, ...).
    EvalResult identity21(int j, long long shift, Complex first, int rec) {
        Level& L = levels_[j];
        const Complex cond = Complex(1.0, 0.0) - L.e_head;
        if (std::abs(cond) < policy_.conditioning_floor)
            throw EvalError(ErrorClass::conditioning,
                            "eval: |1 - e(lambda_1)| below conditioning floor");

        const double d = L.alphas[1] - L.alphas[0];
        const double eps_tail = eps_work_ / 16.0;

        Complex left(0, 0);
        double left_err = 0.0, left_abs = 0.0;
        if (d == 0.0) {
            EvalResult in = value(j + 1, shift, rec + 1);   // k = -1: argument s1+s2
            left = L.e_head * in.value;
            left_err = in.error_bound;
            left_abs = std::abs(in.value);
        } else {
            Complex pk(1.0, 0.0);   // (first)_k from k = -1
            double dpow = 1.0;
            double prev_abs = kInf;
            const double decay = std::abs(d) / (L.depth - 1 + L.alphas[1]);
            for (int k = -1; k <= policy_.max_k; ++k) {
                if (k >= 0) {
                    pk *= (first + static_cast<double>(k)) / static_cast<double>(k + 1);
                    dpow *= d;
                }
                const Complex coeff = L.e_head * pk * dpow;
                if (k >= 0 && coeff == Complex(0.0, 0.0)) break;
                EvalResult in = value(j + 1, shift + k + 1, rec + 1);
                const Complex term = coeff * in.value;
                left += term;
                left_err += std::abs(coeff) * in.error_bound;
                left_abs += std::abs(term);
                const double ratio =
                    std::abs(first + static_cast<double>(k + 1)) / (k + 2) * decay;
                const double scale = std::max(std::abs(term), prev_abs * ratio);
                if (k >= 2 && ratio < 0.9 && 2.0 * scale * ratio / (1.0 - ratio) < eps_tail) {
                    left_err += 2.0 * scale * ratio / (1.0 - ratio);
                    break;
                }
                if (k == policy_.max_k)
                    left_err += std::abs(term) + scale;
                prev_abs = std::abs(term);
            }
        }

        Complex right(0, 0);
        double right_err = 0.0, right_abs = 0.0;
        {
            Complex pk(1.0, 0.0);
            double prev_abs = kInf;
            const double decay = 1.0 / (L.depth + L.alphas[0]);
            for (int k = 0; k <= policy_.max_k; ++k) {
                pk = (k == 0) ? first : pk * (first + static_cast<double>(k)) /
                                            static_cast<double>(k + 1);
                if (pk == Complex(0.0, 0.0)) break;
                EvalResult in = value(j, shift + k + 1, rec + 1);
                const Complex term = pk * in.value;
                right += term;
                right_err += std::abs(pk) * in.error_bound;
                right_abs += std::abs(term);
                const double ratio =
                    std::abs(first + static_cast<double>(k + 1)) / (k + 2) * decay;
                const double scale = std::max(std::abs(term), prev_abs * ratio);
                if (k >= 4 && ratio < 0.9 && 2.0 * scale * ratio / (1.0 - ratio) < eps_tail) {
                    right_err += 2.0 * scale * ratio / (1.0 - ratio);
                    break;
                }
                if (k == policy_.max_k)
                    right_err += std::abs(term) + scale;
                prev_abs = std::abs(term);
            }
        }

        EvalResult res;
        res.value = (left - right) / cond;
        res.error_bound = (left_err + right_err + 8.0 * kMachEps * (left_abs + right_abs)) /
                          std::abs(cond);
        return res;
    }

    // Depth-1 values: L_1(u) = e(l)[(1+alpha)^{-u} + T(u)] with
    // T(u) = sum_{m>=1} e(l m)(m+beta)^{-u}, beta = 1+alpha.
    EvalResult depth1_value(int j, long long shift, int rec) {
        Level& L = levels_[j];
        const Complex u = L.base_first + static_cast<double>(shift);
        if (L.head_is_hurwitz && std::abs(u - 1.0) < policy_.pole_tolerance)
            throw EvalError(ErrorClass::pole_proximity,
                            "eval: depth-1 pole at s = 1 (twist vanishes)");
        EvalResult T = tail_value(j, shift, rec);
        const Complex head = cpow_neg(1.0 + L.alphas[0], u);
        EvalResult res;
        res.value = L.e_head * (head + T.value);
        res.error_bound = T.error_bound + 4.0 * kMachEps * (std::abs(head) + std::abs(T.value));
        return res;
    }

    EvalResult tail_value(int j, long long shift, int rec) {
        Level& L = levels_[j];
        if (auto it = L.tmemo.find(shift); it != L.tmemo.end()) {
            ++diag_.cache_hits;
            return it->second;
        }
        diag_.recursion_depth = std::max(diag_.recursion_depth, rec);
        ++diag_.evaluations;

        const Complex u = L.base_first + static_cast<double>(shift);
        const double beta = 1.0 + L.alphas[0];
        const double sigma = u.real();
        const double eps_term = eps_work_ / 16.0;

        EvalResult res;
        bool done = false;
        if (sigma - 1.0 >= policy_.direct_cutoff_margin && sigma > L.tail_fail_sigma) {
            DirectSpec spec;
            spec.s = {u};
            spec.lambda = {L.lam_head};
            spec.alpha = {beta};
            if (predict_direct_cutoff(spec, eps_work_) <= direct_budget_) {
                ColumnOutcome c = direct_column(spec, 1, eps_term, direct_budget_);
                diag_.terms_summed += c.updates;
                if (c.bounds[0] <= eps_work_) {
                    res.value = c.values[0];
                    res.error_bound = c.bounds[0];
                    done = true;
                } else {
                    L.tail_fail_sigma = std::max(L.tail_fail_sigma, sigma);
                }
            }
        }
        if (!done) res = L.head_is_hurwitz ? tail_identity_hurwitz(j, shift, u, beta, rec)
                                           : tail_identity_lerch(j, shift, u, beta, rec);
        L.tmemo.emplace(shift, res);
        return res;
    }

    // (u-1) T(u) = beta^{1-u} - sum_{k>=1} (u-1)_k T(u+k).
    EvalResult tail_identity_hurwitz(int j, long long shift, Complex u, double beta, int rec) {
        const Complex divisor = u - 1.0;
        if (std::abs(divisor) < policy_.pole_tolerance)
            throw EvalError(ErrorClass::pole_proximity, "eval: depth-1 pole at s = 1");

        const double eps_tail = eps_work_ / 16.0;
        Complex sum(0, 0);
        double err = 0.0, absacc = 0.0;
        Complex pk = divisor;
        double prev_abs = kInf;
        const double decay = 1.0 / (1.0 + beta);
        for (int k = 1; k <= policy_.max_k; ++k) {
            pk *= (u - 1.0 + static_cast<double>(k)) / static_cast<double>(k + 1);
            const Complex arg = u + static_cast<double>(k);
            if (std::abs(arg - 1.0) <= policy_.pole_tolerance) {
                // Residue of T at u = 1 is 1; the Pochhammer zero cancels it.
                const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
                sum += Complex(sgn / (k + 1.0), 0.0);
                err += std::abs(arg - 1.0) * 4.0;
                prev_abs = 1.0 / (k + 1.0);
                continue;
            }
            if (pk == Complex(0.0, 0.0)) break;
            EvalResult in = tail_value(j, shift + k, rec + 1);
            const Complex term = pk * in.value;
            sum += term;
            err += std::abs(pk) * in.error_bound;
            absacc += std::abs(term);
            const double ratio = std::abs(u + static_cast<double>(k)) / (k + 2) * decay;
            const double scale = std::max(std::abs(term), prev_abs * ratio);
            if (k >= 4 && ratio < 0.9 && 2.0 * scale * ratio / (1.0 - ratio) < eps_tail) {
                err += 2.0 * scale * ratio / (1.0 - ratio);
                break;
            }
            if (k == policy_.max_k) err += std::abs(term) + scale;
            prev_abs = std::abs(term);
        }
        const Complex head = cpow_neg(beta, u - 1.0);
        EvalResult res;
        res.value = (head - sum) / divisor;
        res.error_bound =
            (err + 8.0 * kMachEps * (absacc + std::abs(head))) / std::abs(divisor);
        return res;
    }

    // (e(l)-1) T(u) = sum_{k>=0} (u)_k T(u+k+1) - e(l) beta^{-u}.
    EvalResult tail_identity_lerch(int j, long long shift, Complex u, double beta, int rec) {
        Level& L = levels_[j];
        const Complex cond = L.e_head - 1.0;
        if (std::abs(cond) < policy_.conditioning_floor)
            throw EvalError(ErrorClass::conditioning,
                            "eval: |e(lambda)-1| below conditioning floor");

        const double eps_tail = eps_work_ / 16.0;
        Complex sum(0, 0);
        double err = 0.0, absacc = 0.0;
        Complex pk(1.0, 0.0);
        double prev_abs = kInf;
        const double decay = 1.0 / (1.0 + beta);
        for (int k = 0; k <= policy_.max_k; ++k) {
            pk = (k == 0) ? u : pk * (u + static_cast<double>(k)) / static_cast<double>(k + 1);
            if (pk == Complex(0.0, 0.0)) break;
            EvalResult in = tail_value(j, shift + k + 1, rec + 1);
            const Complex term = pk * in.value;
            sum += term;
            err += std::abs(pk) * in.error_bound;
            absacc += std::abs(term);
            const double ratio = std::abs(u + static_cast<double>(k + 1)) / (k + 2) * decay;
            const double scale = std::max(std::abs(term), prev_abs * ratio);
            if (k >= 4 && ratio < 0.9 && 2.0 * scale * ratio / (1.0 - ratio) < eps_tail) {
                err += 2.0 * scale * ratio / (1.0 - ratio);
                break;
            }
            if (k == policy_.max_k) err += std::abs(term) + scale;
            prev_abs = std::abs(term);
        }
        const Complex head = L.e_head * cpow_neg(beta, u);
        EvalResult res;
        res.value = (sum - head) / cond;
        res.error_bound = (err + 8.0 * kMachEps * (absacc + std::abs(head))) / std::abs(cond);
        return res;
    }
};

DirectSpec spec_from(const TwistParams& params, const EvalPoint& s) {
    DirectSpec spec;
    for (int i = 0; i < params.depth; ++i) {
        spec.s.push_back(s.coord(i));
        spec.lambda.push_back(params.lambdas[i]);
        spec.alpha.push_back(params.alphas[i]);
    }
    return spec;
}

} // namespace

EvalResult eval_direct(const TwistParams& params, const EvalPoint& s,
                       const TruncationPolicy& policy) {
    policy.validate();
    if (params.depth != s.dim())
        throw EvalError(ErrorClass::usage, "eval_direct: point dimension does not match depth");
    DirectSpec spec = spec_from(params, s);
    if (spec.margin() < policy.direct_cutoff_margin)
        throw EvalError(ErrorClass::region,
                        "eval_direct: point margin below direct cutoff; use eval_continued");
    ColumnOutcome c = direct_column(spec, 1, policy.eps, policy.max_terms);
    if (!c.ok)
        throw EvalError(ErrorClass::accuracy,
                        "eval_direct: max_terms exhausted at error bound " +
                            std::to_string(c.bounds[0]),
                        c.bounds[0]);
    EvalResult res;
    res.value = c.values[0];
    res.error_bound = c.bounds[0];
    res.region_index = region_index(s).m;
    res.diagnostics.terms_summed = c.updates;
    return res;
}

EvalResult eval_continued(const TwistParams& params, const EvalPoint& s,
                          const TruncationPolicy& policy) {
    Engine engine(params, s, policy);
    return engine.run();
}

EvalResult eval_depth1(const TwistParams& params, Complex s, const TruncationPolicy& policy) {
    if (params.depth != 1)
        throw EvalError(ErrorClass::usage, "eval_depth1: params must have depth 1");
    Eigen::VectorXcd pt(1);
    pt[0] = s;
    return eval_continued(params, EvalPoint(pt), policy);
}

Complex euler_maclaurin_hurwitz(Complex s, double a, double eps) {
    if (a <= 0.0) throw EvalError(ErrorClass::usage, "euler_maclaurin_hurwitz: a must be > 0");
    if (std::abs(s - 1.0) < 1e-10)
        throw EvalError(ErrorClass::pole_proximity, "euler_maclaurin_hurwitz: pole at s = 1");

    const int J = 18;
    static const std::vector<double> b2 = [] {
        std::vector<double> v;
        auto polys = bernoulli_polys(2 * 20 + 2);
        for (int j = 1; j <= 20 + 1; ++j) v.push_back(polys[2 * j].coeffs[0].to_double());
        return v;
    }();

    const double sigma = s.real();
    double N = std::max({8.0, std::ceil(std::abs(s.imag()) * 0.5), std::ceil(2.0 - sigma)});
    if (sigma + 2 * J + 1 <= 1.0)
        throw EvalError(ErrorClass::usage, "euler_maclaurin_hurwitz: Re(s) too negative");

    auto rising = [&](Complex z, int m) {
        Complex acc(1.0, 0.0);
        for (int i = 0; i < m; ++i) acc *= z + static_cast<double>(i);
        return acc;
    };

    for (;; N *= 2) {
        if (N > 1e7)
            throw EvalError(ErrorClass::accuracy, "euler_maclaurin_hurwitz: cannot reach eps");
        const double base = N + a;
        const double remabs = std::abs(b2[J]) / std::tgamma(2.0 * J + 3.0) *
                              std::abs(rising(s, 2 * J + 1)) *
                              rpow_neg(base, sigma + 2 * J + 1) *
                              (1.0 + std::abs(s + 2.0 * J + 1.0) / (sigma + 2 * J + 1));
        if (remabs > eps) continue;

        Complex acc(0, 0);
        for (double n = 0; n < N; ++n) acc += cpow_neg(n + a, s);
        acc += cpow_neg(base, s - 1.0) / (s - 1.0);
        acc += 0.5 * cpow_neg(base, s);
        Complex corr(0, 0);
        Integer fact2j(2);
        for (int jj = 1; jj <= J; ++jj) {
            const double b = b2[jj - 1];
            corr += b / fact2j.convert_to<double>() * rising(s, 2 * jj - 1) *
                    cpow_neg(base, s + static_cast<double>(2 * jj - 1));
            fact2j *= (2 * jj + 1);
            fact2j *= (2 * jj + 2);
        }
        return acc + corr;
    }
}

double ramanujan_residual(Complex s, int max_k, double eps) {
    if (s.real() <= 1.0)
        throw EvalError(ErrorClass::region, "ramanujan_residual: requires Re(s) > 1");
    Complex acc(0, 0);
    Complex pk(1.0, 0.0);
    const double eps_term = std::min(eps / (4.0 * (max_k + 1)), 1e-13);
    for (int k = 0; k <= max_k; ++k) {
        pk = (k == 0) ? (s - 1.0)
                      : pk * (s - 1.0 + static_cast<double>(k)) / static_cast<double>(k + 1);
        // zeta(s+k) - 1 computed directly as the Hurwitz sum from n = 2.
        const Complex zm1 = euler_maclaurin_hurwitz(s + static_cast<double>(k), 2.0, eps_term);
        acc += pk * zm1;
    }
    return std::abs(acc - 1.0);
}

double identity_residual(const TwistParams& params, const EvalPoint& s, int max_k,
                         const TruncationPolicy& policy) {
    policy.validate();
    DirectSpec spec = spec_from(params, s);
    if (spec.margin() < policy.direct_cutoff_margin)
        throw EvalError(ErrorClass::region, "identity_residual: point is not interior enough");

    const int K = std::min(max_k, policy.max_k);
    const double eps_entry = policy.eps / 8.0;

    if (params.depth == 1) {
        const Complex u = s.coord(0);
        const double lam = params.lambdas[0];
        const double alpha = params.alphas[0];
        if (lam == 0.0) {
            // (a)/(b): sum_k (s-1)_k zeta_1(s+k; alpha) = head, via the oracle.
            Complex acc(0, 0);
            Complex pk(1.0, 0.0);
            for (int k = 0; k <= K; ++k) {
                pk = (k == 0) ? (u - 1.0)
                              : pk * (u - 1.0 + static_cast<double>(k)) /
                                    static_cast<double>(k + 1);
                const double base = (alpha == 0.0) ? 2.0 : 1.0 + alpha;
                acc += pk * euler_maclaurin_hurwitz(u + static_cast<double>(k), base,
                                                    std::min(eps_entry, 1e-13));
            }
            const Complex head = (alpha == 0.0) ? Complex(1.0, 0.0)
                                                : cpow_neg(alpha, u - 1.0);
            return std::abs(acc - head);
        }
        // (c)/(d): (e(l)-1) L1(u) = sum_k (u)_k L1(u+k+1) - e(l) alpha^{-u},
        // with the alpha = 0 variant using L1(u+k+1) - e(l) and head -e(l).
        DirectSpec d1;
        d1.s = {u};
        d1.lambda = {lam};
        d1.alpha = {alpha};
        ColumnOutcome col = direct_column(d1, K + 2, eps_entry, policy.max_terms);
        if (!col.ok)
            throw EvalError(ErrorClass::accuracy, "identity_residual: direct sums too shallow",
                            col.bounds[0]);
        const Complex e = unit_twist(lam);
        Complex rhs(0, 0);
        Complex pk(1.0, 0.0);
        for (int k = 0; k <= K; ++k) {
            pk = (k == 0) ? u : pk * (u + static_cast<double>(k)) / static_cast<double>(k + 1);
            if (alpha == 0.0)
                rhs += pk * (col.values[k + 1] - e);
            else
                rhs += pk * col.values[k + 1];
        }
        if (alpha == 0.0)
            rhs += -e;
        else
            rhs += -e * cpow_neg(alpha, u);
        const Complex lhs = (e - 1.0) * col.values[0];
        return std::abs(lhs - rhs);
    }

    // Depth >= 2: both sides of (2.1)/(2.2) by batched direct columns.
    const bool hurwitz_head = params.lambdas[0] == 0.0;
    const Complex s1 = s.coord(0);

    ColumnOutcome right = direct_column(spec, K + 2, eps_entry, policy.max_terms);
    if (!right.ok)
        throw EvalError(ErrorClass::accuracy, "identity_residual: direct sums too shallow",
                        right.bounds[0]);

    DirectSpec collapsed;
    const int c0 = hurwitz_head ? -1 : 0;   // smallest collapsed shift
    collapsed.s.push_back(s.coord(0) + s.coord(1) + static_cast<double>(c0));
    for (int i = 2; i < params.depth; ++i) collapsed.s.push_back(s.coord(i));
    collapsed.lambda.push_back(wrap_unit(params.mus[1]));
    for (int i = 2; i < params.depth; ++i) collapsed.lambda.push_back(params.lambdas[i]);
    collapsed.alpha.assign(params.alphas.data() + 1, params.alphas.data() + params.depth);
    ColumnOutcome left = direct_column(collapsed, K + 2, eps_entry, policy.max_terms);
    if (!left.ok)
        throw EvalError(ErrorClass::accuracy, "identity_residual: direct sums too shallow",
                        left.bounds[0]);

    const double d = params.alphas[1] - params.alphas[0];
    Complex lhs(0, 0), rhs(0, 0);
    if (hurwitz_head) {
        Complex pk(1.0, 0.0);
        double dpow = 1.0;
        for (int k = -1; k <= K; ++k) {
            if (k >= 0) {
                pk *= (s1 - 1.0 + static_cast<double>(k)) / static_cast<double>(k + 1);
                dpow *= d;
                if (dpow == 0.0 && k >= 0) break;
            }
            lhs += pk * dpow * left.values[k + 1];
        }
        pk = Complex(1.0, 0.0);
        for (int k = 0; k <= K; ++k) {
            pk = (k == 0) ? (s1 - 1.0)
                          : pk * (s1 - 1.0 + static_cast<double>(k)) /
                                static_cast<double>(k + 1);
            rhs += pk * right.values[k];
        }
    } else {
        const Complex e1 = unit_twist(params.lambdas[0]);
        Complex pk(1.0, 0.0);
        double dpow = 1.0;
        for (int k = -1; k <= K; ++k) {
            if (k >= 0) {
                pk *= (s1 + static_cast<double>(k)) / static_cast<double>(k + 1);
                dpow *= d;
                if (dpow == 0.0 && k >= 0) break;
            }
            lhs += e1 * pk * dpow * left.values[k + 1];
        }
        rhs = (Complex(1.0, 0.0) - e1) * right.values[0];
        pk = Complex(1.0, 0.0);
        for (int k = 0; k <= K; ++k) {
            pk = (k == 0) ? s1 : pk * (s1 + static_cast<double>(k)) / static_cast<double>(k + 1);
            rhs += pk * right.values[k + 1];
        }
    }
    return std::abs(lhs - rhs);
}

} // namespace mlz
