#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace ck {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat make_rat(long long num, long long den = 1) {
    if (den == 0) raise(errc::internal_error, "rational with zero denominator");
    return Rat(Int(num), Int(den));
}

inline std::string rat_to_string(const Rat& q) {
    const Int num = boost::multiprecision::numerator(q);
    const Int den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

/// Parses "p", "p/q" or a plain decimal like "2.5" into an exact rational.
inline Rat rat_from_string(const std::string& s) {
    if (s.empty()) raise(errc::config_error, "empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Int num(s.substr(0, slash));
            Int den(s.substr(slash + 1));
            if (den == 0) raise(errc::config_error, "zero denominator in '" + s + "'");
            return Rat(num, den);
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            size_t frac_len = s.size() - dot - 1;
            Int den = 1;
            for (size_t i = 0; i < frac_len; ++i) den *= 10;
            return Rat(Int(digits), den);
        }
        return Rat(Int(s));
    } catch (const std::exception& e) {
        raise(errc::config_error, "bad rational literal '" + s + "': " + e.what());
    }
}

/// Exact nonnegative metric value. Graph and L1/Linf distances are plain
/// rationals; L2 distances are carried as sqrt(q) with q the exact squared
/// value, so every comparison stays exact with no floating point anywhere.
struct Dist {
    Rat v;
    bool is_sqrt = false;

    static Dist rational(Rat q) { return Dist{std::move(q), false}; }
    static Dist sqrt_of(Rat q) { return Dist{std::move(q), true}; }
    static Dist zero() { return Dist{Rat(0), false}; }

    bool exactly_rational() const { return !is_sqrt; }

    const Rat& as_rational() const {
        if (is_sqrt) raise(errc::internal_error, "sqrt-flavored distance used as rational");
        return v;
    }

    std::string str() const {
        if (!is_sqrt) return rat_to_string(v);
        return "sqrt(" + rat_to_string(v) + ")";
    }
};

/// Three-way comparison of exact distances; both operands nonnegative.
inline int dist_cmp(const Dist& a, const Dist& b) {
    if (a.is_sqrt == b.is_sqrt) return a.v < b.v ? -1 : (a.v == b.v ? 0 : 1);
    // Mixed flavor: compare squares (valid since both values are >= 0).
    Rat lhs = a.is_sqrt ? a.v : Rat(a.v * a.v);
    Rat rhs = b.is_sqrt ? b.v : Rat(b.v * b.v);
    return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
}

inline int dist_cmp(const Dist& a, const Rat& b) { return dist_cmp(a, Dist::rational(b)); }

inline bool operator<(const Dist& a, const Dist& b) { return dist_cmp(a, b) < 0; }
inline bool operator<=(const Dist& a, const Dist& b) { return dist_cmp(a, b) <= 0; }
inline bool operator==(const Dist& a, const Dist& b) { return dist_cmp(a, b) == 0; }
inline bool operator>(const Dist& a, const Dist& b) { return dist_cmp(a, b) > 0; }
inline bool operator>=(const Dist& a, const Dist& b) { return dist_cmp(a, b) >= 0; }

inline bool dist_leq(const Dist& d, const Rat& r) { return dist_cmp(d, r) <= 0; }
inline bool dist_lt(const Dist& d, const Rat& r) { return dist_cmp(d, r) < 0; }

/// Exact test of a <= b + c. All three must share a flavor (one metric).
/// For sqrt values: sqrt(A) <= sqrt(B) + sqrt(C)  iff  A <= B + C
/// or (A - B - C)^2 <= 4 B C (after one squaring each side).
inline bool dist_leq_sum(const Dist& a, const Dist& b, const Dist& c) {
    if (!a.is_sqrt && !b.is_sqrt && !c.is_sqrt) return a.v <= b.v + c.v;
    if (a.is_sqrt && b.is_sqrt && c.is_sqrt) {
        Rat slack = a.v - b.v - c.v;
        if (slack <= 0) return true;
        return slack * slack <= 4 * b.v * c.v;
    }
    raise(errc::internal_error, "mixed distance flavors in triangle comparison");
}

inline Dist dist_add_rat(const Dist& a, const Rat& r) {
    if (a.is_sqrt) raise(errc::internal_error, "adding rational to sqrt distance");
    return Dist::rational(a.v + r);
}

/// Smallest convenient rational >= the distance: identity for rational
/// values, an integer ceiling of the root for sqrt values.
inline Rat dist_rat_upper(const Dist& d) {
    if (!d.is_sqrt) return d.v;
    Int num = boost::multiprecision::numerator(d.v);
    Int den = boost::multiprecision::denominator(d.v);
    Int q = num / den + 1; // q > v, so sqrt(q) ... we need ceil(sqrt(num/den))
    Int root = boost::multiprecision::sqrt(q);
    while (root * root * den < num) ++root;
    return Rat(root);
}

} // namespace ck
