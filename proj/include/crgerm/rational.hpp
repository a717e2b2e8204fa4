#pragma once

// Exact rational scalars and complex rationals. All jet-level computation in
// this library runs on these; doubles appear only at the numeric-evaluation
// boundary.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace crgerm {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

inline Rat rat_pow(const Rat& base, int exponent) {
    if (exponent == 0) return Rat(1);
    if (exponent < 0) {
        if (base == 0) throw std::domain_error("rat_pow: zero base with negative exponent");
        return Rat(1) / rat_pow(base, -exponent);
    }
    Rat acc(1), b = base;
    int e = exponent;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

inline BigInt factorial(int n) {
    BigInt acc(1);
    for (int k = 2; k <= n; ++k) acc *= k;
    return acc;
}

// Canonical "p/q" rendering (q > 0, gcd-reduced by cpp_rational itself).
inline std::string rat_string(const Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "p/q", "p", and plain decimals like "-0.25" (kept exact).
inline Rat rat_parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt p(s.substr(0, slash));
        BigInt q(s.substr(slash + 1));
        if (q == 0) throw std::domain_error("rat_parse: zero denominator in '" + s + "'");
        return Rat(p, q);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt p(digits);
    BigInt q(1);
    for (std::size_t k = dot + 1; k < s.size(); ++k) q *= 10;
    return Rat(p, q);
}

/// Complex number with exact rational real and imaginary parts.
struct RatC {
    Rat re{0};
    Rat im{0};

    RatC() = default;
    RatC(Rat r) : re(std::move(r)) {}
    RatC(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
    RatC(int r) : re(r) {}
    RatC(int r, int i) : re(r), im(i) {}

    static RatC unit_i() { return RatC(Rat(0), Rat(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    RatC conj() const { return RatC(re, -im); }
    Rat norm() const { return re * re + im * im; }

    std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

    friend RatC operator+(const RatC& a, const RatC& b) { return {a.re + b.re, a.im + b.im}; }
    friend RatC operator-(const RatC& a, const RatC& b) { return {a.re - b.re, a.im - b.im}; }
    friend RatC operator-(const RatC& a) { return {-a.re, -a.im}; }
    friend RatC operator*(const RatC& a, const RatC& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend RatC operator/(const RatC& a, const RatC& b) {
        Rat n = b.norm();
        if (n == 0) throw std::domain_error("RatC: division by zero");
        RatC num = a * b.conj();
        return {num.re / n, num.im / n};
    }
    RatC& operator+=(const RatC& o) { re += o.re; im += o.im; return *this; }
    RatC& operator-=(const RatC& o) { re -= o.re; im -= o.im; return *this; }
    RatC& operator*=(const RatC& o) { *this = *this * o; return *this; }

    friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const RatC& a, const RatC& b) { return !(a == b); }
};

inline RatC ratc_pow(const RatC& base, int exponent) {
    if (exponent < 0) return RatC(1) / ratc_pow(base, -exponent);
    RatC acc(1), b = base;
    int e = exponent;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

inline std::string ratc_string(const RatC& c) {
    if (c.im == 0) return rat_string(c.re);
    return rat_string(c.re) + (c.im > 0 ? "+" : "-") + rat_string(abs(c.im)) + "i";
}

}  // namespace crgerm
