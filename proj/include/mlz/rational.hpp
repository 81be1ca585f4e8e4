#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace mlz {

using Integer = boost::multiprecision::cpp_int;

// Exact rational scalar, always normalized (gcd 1, positive denominator).
// Thin strong type over cpp_rational: the wrapper keeps Boost's templated
// constructors out of Eigen's scalar-promotion overload set.
class Rational {
public:
    using rep_type = boost::multiprecision::cpp_rational;

    Rational() = default;
    Rational(int n) : v_(n) {}
    Rational(long n) : v_(n) {}
    Rational(long long n) : v_(n) {}
    Rational(const Integer& n) : v_(n) {}
    Rational(const Integer& num, const Integer& den) : v_(rep_type(num) / rep_type(den)) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
    }
    Rational(long long num, long long den) : Rational(Integer(num), Integer(den)) {}
    explicit Rational(rep_type v) : v_(std::move(v)) {}

    const rep_type& rep() const { return v_; }
    Integer num() const { return numerator(v_); }
    Integer den() const { return denominator(v_); }

    bool is_zero() const { return v_.is_zero(); }
    bool is_integer() const { return denominator(v_) == 1; }

    double to_double() const { return static_cast<double>(v_); }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(a.v_ / b.v_);
    }
    Rational operator-() const { return Rational(-v_); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.v_; }

    std::string str() const {
        std::string s = num().str();
        if (!is_integer()) s += "/" + den().str();
        return s;
    }

private:
    rep_type v_;
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

inline Rational pow(Rational base, long long e) {
    if (e < 0) { base = Rational(1) / base; e = -e; }
    Rational out(1);
    while (e > 0) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

// Every finite double is a dyadic rational; this recovers it exactly.
inline Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rational_from_double: non-finite input");
    if (x == 0.0) return Rational(0);
    int exp2 = 0;
    double m = std::frexp(x, &exp2);   // x = m * 2^exp2, |m| in [1/2, 1)
    auto mant = static_cast<long long>(std::ldexp(m, 53));
    exp2 -= 53;
    Rational r(mant);
    Integer two(2);
    if (exp2 >= 0) {
        Integer p(1);
        for (int i = 0; i < exp2; ++i) p *= two;
        return r * Rational(p);
    }
    Integer p(1);
    for (int i = 0; i < -exp2; ++i) p *= two;
    return r / Rational(p);
}

// Parses "p/q" or a plain integer. Decimal strings are not accepted here;
// callers fall back to double parsing for those.
inline std::optional<Rational> parse_rational(const std::string& s) {
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    auto is_int = [](const std::string& t) {
        if (t.empty()) return false;
        std::size_t i = (t[0] == '+' || t[0] == '-') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    if (slash == std::string::npos) {
        if (!is_int(s)) return std::nullopt;
        return Rational(Integer(s));
    }
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    if (!is_int(a) || !is_int(b)) return std::nullopt;
    Integer den(b);
    if (den == 0) return std::nullopt;
    return Rational(Integer(a), den);
}

inline Integer factorial(int n) {
    Integer f(1);
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline Integer binomial(int n, int k) {
    if (k < 0 || k > n) return Integer(0);
    k = std::min(k, n - k);
    Integer out(1);
    for (int i = 1; i <= k; ++i) {
        out *= (n - k + i);
        out /= i;
    }
    return out;
}

} // namespace mlz

namespace Eigen {

template <>
struct NumTraits<mlz::Rational> {
    using Real = mlz::Rational;
    using NonInteger = mlz::Rational;
    using Literal = mlz::Rational;
    using Nested = mlz::Rational;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 60,
        MulCost = 60
    };
    static inline Real epsilon() { return mlz::Rational(0); }
    static inline Real dummy_precision() { return mlz::Rational(0); }
    static inline int digits10() { return 0; }
};

} // namespace Eigen
