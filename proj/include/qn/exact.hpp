#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "qn/error.hpp"

namespace qn {

using Int = boost::multiprecision::cpp_int;

inline Int ipow(Int base, unsigned long e) {
    Int r = 1;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// Exact fraction in canonical lowest terms, denominator > 0. Immutable value
// type; every operation returns a fresh value. No floating point anywhere.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long v) : num_(v), den_(1) {}          // NOLINT(google-explicit-constructor)
    Rational(const Int& v) : num_(v), den_(1) {}    // NOLINT(google-explicit-constructor)
    Rational(Int n, Int d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    const Int& num() const { return num_; }
    const Int& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    Int floor() const {
        if (num_ >= 0) return num_ / den_;
        return -((-num_ + den_ - 1) / den_);
    }
    Int ceil() const { return -(-*this).floor(); }
    Rational frac() const { return *this - Rational(floor()); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rational operator+(const Rational& o) const {
        return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    Rational operator-(const Rational& o) const {
        return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    }
    Rational operator*(const Rational& o) const { return Rational(num_ * o.num_, den_ * o.den_); }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) fail(Err::DomainError, "division by zero");
        return Rational(num_ * o.den_, den_ * o.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    int cmp(const Rational& o) const {
        Int lhs = num_ * o.den_;
        Int rhs = o.num_ * den_;
        return lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
    }
    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return cmp(o) < 0; }
    bool operator<=(const Rational& o) const { return cmp(o) <= 0; }
    bool operator>(const Rational& o) const { return cmp(o) > 0; }
    bool operator>=(const Rational& o) const { return cmp(o) >= 0; }

    // Canonical text encoding: "p/q" in lowest terms with q > 0, "p" when q = 1.
    std::string str() const {
        std::string s = num_.str();
        if (den_ != 1) {
            s += "/";
            s += den_.str();
        }
        return s;
    }

    static Rational parse(std::string_view s) {
        auto slash = s.find('/');
        try {
            if (slash == std::string_view::npos) return Rational(Int(std::string(s)));
            Int n{std::string(s.substr(0, slash))};
            Int d{std::string(s.substr(slash + 1))};
            if (d == 0) fail(Err::ParseError, "zero denominator in '" + std::string(s) + "'");
            return Rational(n, d);
        } catch (const QnError&) {
            throw;
        } catch (const std::exception&) {
            fail(Err::ParseError, "bad rational '" + std::string(s) + "'");
        }
    }

private:
    void normalize() {
        if (den_ == 0) fail(Err::DomainError, "zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    Int num_, den_;
};

inline Rational rat_pow(const Int& base, long e) {
    if (e >= 0) return Rational(ipow(base, static_cast<unsigned long>(e)));
    return Rational(Int(1), ipow(base, static_cast<unsigned long>(-e)));
}

// The slope group of the periodic maps: n^i (n+1)^j. The pair (i, j) is
// unique because n and n+1 are coprime.
struct SlopeExponents {
    long i = 0;
    long j = 0;
    int base_n = 2;

    Rational value() const { return rat_pow(base_n, i) * rat_pow(base_n + 1, j); }
    bool operator==(const SlopeExponents& o) const {
        return i == o.i && j == o.j && base_n == o.base_n;
    }
};

namespace detail {
// Strips all factors p from v, returning the multiplicity.
inline long strip_factor(Int& v, const Int& p) {
    long c = 0;
    while (v % p == 0) {
        v /= p;
        ++c;
    }
    return c;
}
}  // namespace detail

// Factors q = n^i (n+1)^j by trial division by n and n+1 only, verified by
// exact recomposition.
inline SlopeExponents slope_factor(const Rational& q, int n) {
    if (n < 2) fail(Err::DomainError, "slope_factor needs n >= 2");
    if (q.sign() <= 0) fail(Err::NotAProductOfBases, "slope " + q.str() + " is not positive");
    Int a = q.num(), b = q.den();
    Int bn = n, bn1 = n + 1;
    SlopeExponents se;
    se.base_n = n;
    se.i = detail::strip_factor(a, bn) - detail::strip_factor(b, bn);
    se.j = detail::strip_factor(a, bn1) - detail::strip_factor(b, bn1);
    if (a != 1 || b != 1)
        fail(Err::NotAProductOfBases,
             q.str() + " has a factor dividing neither " + std::to_string(n) + " nor " +
                 std::to_string(n + 1));
    if (se.value() != q) fail(Err::Internal, "slope_factor recomposition mismatch");
    return se;
}

// True iff every prime factor of the denominator of x divides m, i.e.
// x lies in Z[1/m]. Never factors anything: repeated gcd stripping.
inline bool in_ring(const Rational& x, const Int& m) {
    Int d = x.den();
    while (d > 1) {
        Int g = boost::multiprecision::gcd(d, m);
        if (g == 1) return false;
        d /= g;
    }
    return true;
}

inline bool in_ring(const Rational& x, int m) { return in_ring(x, Int(m)); }

// Minimal k with x * n^k integral (x must lie in Z[1/n]).
inline long adic_depth(const Rational& x, int n) {
    if (!in_ring(x, n)) fail(Err::NotInRing, x.str() + " not in Z[1/" + std::to_string(n) + "]");
    Int d = x.den();
    Int bn = n;
    long k = 0;
    while (d > 1) {
        d /= boost::multiprecision::gcd(d, bn);
        ++k;
    }
    return k;
}

// x * n^k as an integer; requires depth(x) <= k.
inline Int numerator_at_depth(const Rational& x, int n, long k) {
    Rational scaled = x * rat_pow(Int(n), k);
    if (!scaled.is_integer()) fail(Err::Internal, "numerator_at_depth: depth too small");
    return scaled.num();
}

namespace detail {
inline long mod_inverse(long a, long m) {
    long t = 0, newt = 1, r = m, newr = ((a % m) + m) % m;
    while (newr != 0) {
        long q = r / newr;
        long tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) fail(Err::Internal, "mod_inverse: not invertible");
    return ((t % m) + m) % m;
}
}  // namespace detail

// The ring homomorphism Z[1/n] -> Z/(n-1) sending n to 1: the residue of the
// numerator of x written as p/n^k. Classifies the F_n-orbits O_i.
inline long residue_class(const Rational& x, int n) {
    long m = n - 1;
    if (m == 1) return 0;
    if (!in_ring(x, n)) fail(Err::NotInRing, x.str() + " not in Z[1/" + std::to_string(n) + "]");
    long num_mod = static_cast<long>(x.num() % m);
    long den_mod = static_cast<long>(x.den() % m);
    long inv = detail::mod_inverse(den_mod, m);
    return (((num_mod * inv) % m) + m) % m;
}

// Exact decimal rendering for presentation layers (plots); truncated, never
// used in machine formats.
inline std::string decimal_string(const Rational& x, int digits = 12) {
    std::string out;
    Rational v = x;
    if (v.sign() < 0) {
        out += "-";
        v = -v;
    }
    Int ip = v.floor();
    out += ip.str();
    Rational rem = v - Rational(ip);
    if (rem.is_zero()) return out;
    out += ".";
    for (int i = 0; i < digits && !rem.is_zero(); ++i) {
        rem *= 10;
        Int d = rem.floor();
        out += d.str();
        rem -= Rational(d);
    }
    return out;
}

}  // namespace qn
