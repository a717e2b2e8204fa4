#pragma once

// Numeric vanishing-order estimation: the surrogate for "vanishes to
// infinite order", which no finite computation can decide.
//
// The magnitude of e is sampled on circles r = 2^-k, k = 4..20 (16 angles,
// log scale via logabs_eval so flat functions survive underflow). The
// reported slope is the least-squares fit of log max|e| against log r; the
// infinite flag fires when the per-window slopes exceed 50 and keep growing
// over the last eight windows.

#include "crgerm/expr.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace crgerm {

struct OrderEstimate {
    double slope = 0.0;
    bool infinite_flag = false;
    std::vector<double> log_r;        // abscissae with a finite magnitude sample
    std::vector<double> log_max_abs;  // max over angles, natural log
    std::vector<double> window_slopes;
};

inline OrderEstimate estimate_order_from(const std::function<double(Complex)>& log_abs,
                                         int k_min = 4, int k_max = 20, int angles = 16) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    OrderEstimate est;
    int sampled = 0;
    for (int k = k_min; k <= k_max; ++k) {
        double r = std::ldexp(1.0, -k);
        double m = -inf;
        for (int a = 0; a < angles; ++a) {
            double th = 2.0 * 3.14159265358979323846 * a / angles;
            m = std::max(m, log_abs(std::polar(r, th)));
        }
        ++sampled;
        if (m == -inf) continue;  // genuine zero on this circle
        est.log_r.push_back(std::log(r));
        est.log_max_abs.push_back(m);
    }

    const std::size_t n = est.log_r.size();
    if (n == 0) {
        // identically zero on the sampled grid: flat by any measure
        est.infinite_flag = sampled > 0;
        est.slope = inf;
        return est;
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = 0; j < n; ++j) {
        sx += est.log_r[j];
        sy += est.log_max_abs[j];
        sxx += est.log_r[j] * est.log_r[j];
        sxy += est.log_r[j] * est.log_max_abs[j];
    }
    double denom = n * sxx - sx * sx;
    est.slope = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;

    for (std::size_t j = 0; j + 1 < n; ++j)
        est.window_slopes.push_back((est.log_max_abs[j + 1] - est.log_max_abs[j]) /
                                    (est.log_r[j + 1] - est.log_r[j]));

    double peak = 0.0;
    for (double s : est.window_slopes) peak = std::max(peak, s);
    bool growing = est.window_slopes.size() >= 8;
    if (growing) {
        std::size_t start = est.window_slopes.size() - 8;
        for (std::size_t j = start; j + 1 < est.window_slopes.size(); ++j)
            if (est.window_slopes[j + 1] <= est.window_slopes[j]) {
                growing = false;
                break;
            }
    }
    est.infinite_flag = peak > 50.0 && growing;
    return est;
}

/// Vanishing-order estimate for a real-valued expression with e(0) = 0.
inline OrderEstimate estimate_order(const Expr& e) {
    return estimate_order_from([&](Complex z) { return logabs_eval(e, z, 0.0); });
}

}  // namespace crgerm
