#include "mlz/bernoulli.hpp"

#include <algorithm>
#include <mutex>
#include <random>
#include <shared_mutex>

namespace mlz {

namespace {

// Process-wide coefficient cache: concurrent readers, serialized extension.
class BernoulliCache {
public:
    std::vector<BernoulliPoly> get(int N) {
        {
            std::shared_lock lock(mu_);
            if (static_cast<int>(polys_.size()) > N)
                return {polys_.begin(), polys_.begin() + N + 1};
        }
        std::unique_lock lock(mu_);
        extend(N);
        return {polys_.begin(), polys_.begin() + N + 1};
    }

private:
    void extend(int N) {
        if (polys_.empty()) {
            BernoulliPoly b0;
            b0.degree = 0;
            b0.coeffs.resize(1);
            b0.coeffs[0] = Rational(1);
            polys_.push_back(std::move(b0));
            numbers_.push_back(Rational(1));
        }
        // Bernoulli numbers by b_n = -1/(n+1) * sum_{j<n} C(n+1,j) b_j,
        // then B_n(t) = sum_j C(n,j) b_{n-j} t^j.
        for (int n = static_cast<int>(polys_.size()); n <= N; ++n) {
            Rational acc(0);
            for (int j = 0; j < n; ++j)
                acc += Rational(binomial(n + 1, j)) * numbers_[j];
            numbers_.push_back(-acc / Rational(n + 1));

            BernoulliPoly p;
            p.degree = n;
            p.coeffs.resize(n + 1);
            for (int j = 0; j <= n; ++j)
                p.coeffs[j] = Rational(binomial(n, j)) * numbers_[n - j];
            polys_.push_back(std::move(p));
        }
    }

    std::shared_mutex mu_;
    std::vector<BernoulliPoly> polys_;
    std::vector<Rational> numbers_;
};

BernoulliCache& cache() {
    static BernoulliCache c;
    return c;
}

} // namespace

std::vector<BernoulliPoly> bernoulli_polys(int N) {
    if (N < 0) throw std::invalid_argument("bernoulli_polys: N must be >= 0");
    return cache().get(N);
}

BernoulliPoly bernoulli_poly(int n) {
    return bernoulli_polys(n).back();
}

Rational bernoulli_number(int n) {
    return bernoulli_poly(n).coeffs[0];
}

Rational bernoulli_eval(int n, const Rational& t) { return bernoulli_poly(n).eval(t); }
Complex bernoulli_eval(int n, Complex t) { return bernoulli_poly(n).eval_as<Complex>(t); }
double bernoulli_eval(int n, double t) { return bernoulli_poly(n).eval_as<double>(t); }

std::string ZeroIndexSet::describe() const {
    switch (kind) {
        case ZeroSetKind::empty: return "empty";
        case ZeroSetKind::odd_ge1: return "odd n >= 1";
        case ZeroSetKind::odd_ge3: return "odd n >= 3";
        case ZeroSetKind::numeric: {
            if (indeterminate.empty())
                return "no zero found up to n = " + std::to_string(nmax) + " (numeric)";
            std::string s = "numerically indeterminate at n in {";
            for (std::size_t i = 0; i < indeterminate.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(indeterminate[i]);
            }
            s += "} up to n = " + std::to_string(nmax);
            return s;
        }
    }
    return "";
}

ZeroIndexSet zero_index_set(const Rational& d, int) {
    if (!(d > Rational(-1) && d < Rational(1)))
        throw EvalError(ErrorClass::usage, "zero_index_set: d must lie in (-1,1)");
    ZeroIndexSet out;
    if (d.is_zero()) {
        out.kind = ZeroSetKind::odd_ge3;
    } else if (d == Rational(1, 2)) {
        out.kind = ZeroSetKind::odd_ge1;
    } else {
        // Inkeri: the only rational zeros of any B_n are 0, 1/2 and 1.
        out.kind = ZeroSetKind::empty;
    }
    return out;
}

ZeroIndexSet zero_index_set_numeric(double d, int nmax, double threshold) {
    Rational exact = rational_from_double(d);
    if (exact.den() <= Integer(1 << 20))
        return zero_index_set(exact, nmax);

    ZeroIndexSet out;
    out.kind = ZeroSetKind::numeric;
    out.nmax = nmax;
    auto polys = bernoulli_polys(std::max(nmax, 0));
    for (int n = 1; n <= nmax; ++n)
        if (std::abs(polys[n].eval_as<double>(d)) < threshold)
            out.indeterminate.push_back(n);
    return out;
}

std::vector<Complex> apostol_polys(int N, double a, Complex c) {
    return apostol_polys<Complex>(N, Complex(a, 0.0), c);
}

std::vector<Rational> apostol_polys_exact(int N, const Rational& a, const Rational& c) {
    return apostol_polys<Rational>(N, a, c);
}

int poly_degree(const RationalVector& p) {
    for (int j = static_cast<int>(p.size()) - 1; j >= 0; --j)
        if (!p[j].is_zero()) return j;
    return -1;
}

RationalVector poly_derivative(const RationalVector& p) {
    if (p.size() <= 1) {
        RationalVector z(1);
        z[0] = Rational(0);
        return z;
    }
    RationalVector out(p.size() - 1);
    for (int j = 1; j < p.size(); ++j) out[j - 1] = Rational(j) * p[j];
    return out;
}

RationalVector poly_shift_by_one(const RationalVector& p) {
    // p(t+1) via binomial expansion of each monomial.
    RationalVector out = RationalVector::Constant(p.size(), Rational(0));
    for (int j = 0; j < p.size(); ++j)
        for (int m = 0; m <= j; ++m)
            out[m] += p[j] * Rational(binomial(j, m));
    return out;
}

RationalVector poly_compose_one_minus(const RationalVector& p) {
    RationalVector out = RationalVector::Constant(p.size(), Rational(0));
    for (int j = 0; j < p.size(); ++j) {
        // (1-t)^j = sum_m C(j,m) (-1)^m t^m
        for (int m = 0; m <= j; ++m) {
            Rational c = Rational(binomial(j, m));
            if (m % 2 == 1) c = -c;
            out[m] += p[j] * c;
        }
    }
    return out;
}

namespace {

Integer int_gcd(Integer a, Integer b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Integer t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Integer lcm_of_denominators(const RationalVector& p) {
    Integer l(1);
    for (int j = 0; j < p.size(); ++j) {
        Integer d = p[j].den();
        l = l / int_gcd(l, d) * d;
    }
    return l;
}

using IntPoly = std::vector<Integer>; // index = power, trimmed

IntPoly to_int_poly(const RationalVector& p) {
    Integer l = lcm_of_denominators(p);
    int deg = poly_degree(p);
    IntPoly out(std::max(deg + 1, 1), Integer(0));
    for (int j = 0; j <= deg; ++j) {
        Rational c = p[j] * Rational(l);
        out[j] = c.num();
    }
    return out;
}

int ideg(const IntPoly& p) {
    for (int j = static_cast<int>(p.size()) - 1; j >= 0; --j)
        if (p[j] != 0) return j;
    return -1;
}

void make_primitive(IntPoly& p) {
    Integer g(0);
    for (auto& c : p) g = int_gcd(g, c);
    if (g == 0 || g == 1) return;
    for (auto& c : p)
        c /= g;
}

// Pseudo-remainder lc(b)^(da-db+1) * a mod b; primitive PRS keeps growth down.
IntPoly pseudo_rem(IntPoly a, const IntPoly& b) {
    int da = ideg(a), db = ideg(b);
    const Integer lb = b[db];
    while (da >= db && da >= 0) {
        Integer la = a[da];
        for (int j = 0; j <= da; ++j) a[j] *= lb;
        for (int j = 0; j <= db; ++j) a[da - db + j] -= la * b[j];
        a[da] = 0;
        da = ideg(a);
    }
    a.resize(std::max(da + 1, 1), Integer(0));
    return a;
}

} // namespace

RationalVector poly_gcd(const RationalVector& pa, const RationalVector& pb) {
    IntPoly a = to_int_poly(pa), b = to_int_poly(pb);
    make_primitive(a);
    make_primitive(b);
    if (ideg(a) < ideg(b)) std::swap(a, b);
    while (ideg(b) >= 0) {
        IntPoly r = pseudo_rem(a, b);
        make_primitive(r);
        a = std::move(b);
        b = std::move(r);
    }
    int d = ideg(a);
    RationalVector out = RationalVector::Constant(d + 1, Rational(0));
    for (int j = 0; j <= d; ++j) out[j] = Rational(a[j]);
    if (d >= 0 && out[d] < Rational(0))
        for (int j = 0; j <= d; ++j) out[j] = -out[j];
    return out;
}

namespace {

bool miller_rabin(const Integer& n) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    Integer d = n - 1;
    int r = 0;
    while (d % 2 == 0) { d /= 2; ++r; }
    for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        Integer x = powm(Integer(a), d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < r - 1; ++i) {
            x = (x * x) % n;
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

void pollard_rho(const Integer& n, std::vector<Integer>& out);

void factor_into(const Integer& n, std::vector<Integer>& out) {
    if (n == 1) return;
    if (miller_rabin(n)) { out.push_back(n); return; }
    pollard_rho(n, out);
}

void pollard_rho(const Integer& n, std::vector<Integer>& out) {
    if (n % 2 == 0) { out.push_back(2); factor_into(n / 2, out); return; }
    std::mt19937_64 rng(0x6d6c7a);
    while (true) {
        Integer c = Integer(rng() % 1000003) + 1;
        Integer x(2), y(2), d(1);
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            d = int_gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) {
            factor_into(d, out);
            factor_into(n / d, out);
            return;
        }
    }
}

std::vector<Integer> factorize(Integer n) {
    std::vector<Integer> fac;
    if (n < 0) n = -n;
    for (Integer p(2); p * p <= n && p < 100000; ++p)
        while (n % p == 0) { fac.push_back(p); n /= p; }
    if (n > 1) factor_into(n, fac);
    std::sort(fac.begin(), fac.end());
    return fac;
}

std::vector<Integer> divisors_up_to(const std::vector<Integer>& primes, const Integer& bound) {
    std::vector<Integer> divs{Integer(1)};
    std::size_t i = 0;
    while (i < primes.size()) {
        std::size_t j = i;
        while (j < primes.size() && primes[j] == primes[i]) ++j;
        const std::size_t mult = j - i;
        std::vector<Integer> next;
        for (const auto& d : divs) {
            Integer cur = d;
            next.push_back(cur);
            for (std::size_t e = 0; e < mult; ++e) {
                cur *= primes[i];
                if (cur > bound) break;
                next.push_back(cur);
            }
        }
        divs = std::move(next);
        i = j;
    }
    std::sort(divs.begin(), divs.end());
    divs.erase(std::unique(divs.begin(), divs.end()), divs.end());
    return divs;
}

} // namespace

std::vector<Rational> bernoulli_rational_roots(int n) {
    BernoulliPoly p = bernoulli_poly(n);
    std::vector<Rational> roots;

    // Split off t^v so the remaining constant term is nonzero.
    RationalVector q = p.coeffs;
    int v = 0;
    while (v <= poly_degree(q) && q[v].is_zero()) ++v;
    if (v > 0) {
        roots.push_back(Rational(0));
        RationalVector trimmed(q.size() - v);
        for (int j = v; j < q.size(); ++j) trimmed[j - v] = q[j];
        q = trimmed;
    }
    if (poly_degree(q) == 0) return roots;

    IntPoly z = to_int_poly(q);
    make_primitive(z);
    const Integer lead = z[ideg(z)];
    const Integer constant = z[0];

    // Cauchy bound on root magnitude.
    double maxratio = 0.0;
    for (int j = 0; j < ideg(z); ++j)
        maxratio = std::max(maxratio, std::abs(Rational(z[j], lead).to_double()));
    const Rational bound = rational_from_double(maxratio + 1.0);

    auto ps = factorize(constant);
    auto qs = factorize(lead);
    auto pdivs = divisors_up_to(ps, constant < 0 ? -constant : constant);
    auto qdivs = divisors_up_to(qs, lead < 0 ? -lead : lead);

    for (const auto& dq : qdivs) {
        for (const auto& dp : pdivs) {
            if (int_gcd(dp, dq) != 1) continue;
            Rational cand(dp, dq);
            if (cand > bound) continue;
            for (int sign = 0; sign < 2; ++sign) {
                Rational r = sign ? -cand : cand;
                Rational val(0);
                for (int j = ideg(z); j >= 0; --j) val = val * r + Rational(z[j]);
                if (val.is_zero()) roots.push_back(r);
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

} // namespace mlz
