#pragma once

// Shared helpers for the test suites: deterministic random sampling, finite
// difference oracles, and tolerance predicates.

#include "crgerm/expr.hpp"
#include "crgerm/wirtinger.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace testutil {

using crgerm::Complex;
using crgerm::Deriv;
using crgerm::Expr;

inline constexpr double kPi = 3.14159265358979323846;

struct Sampler {
    std::mt19937 rng;
    explicit Sampler(unsigned seed) : rng(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    Complex annulus(double rmin, double rmax) {
        return std::polar(uniform(rmin, rmax), uniform(0.0, 2.0 * kPi));
    }
};

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(Complex a, Complex b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

// Central finite differences for the Wirtinger derivatives, with zbar bound
// to conj(z) throughout.
inline Complex wirtinger_fd(const Expr& e, Deriv which, Complex z, double v, double h = 1e-5) {
    const auto f = [&](Complex zz, double vv) { return crgerm::eval(e, zz, vv); };
    if (which == Deriv::Dv) return (f(z, v + h) - f(z, v - h)) / (2.0 * h);
    Complex dx = (f(z + Complex(h, 0), v) - f(z - Complex(h, 0), v)) / (2.0 * h);
    Complex dy = (f(z + Complex(0, h), v) - f(z - Complex(0, h), v)) / (2.0 * h);
    if (which == Deriv::Dz) return 0.5 * (dx - Complex(0, 1) * dy);
    return 0.5 * (dx + Complex(0, 1) * dy);
}

}  // namespace testutil
