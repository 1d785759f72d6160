#pragma once

// Independent oracles for the test suites. These deliberately avoid the
// library code paths they are used to check: long-double arithmetic with
// erfcl for the normal kernel, an asymptotic series for deep tails, finite
// differences for derivatives, and dense grids for minimizers.

#include <cmath>
#include <utility>

namespace oracle {

inline long double phi_ld(long double x) {
    const long double inv_sqrt_2pi = 0.3989422804014326779399461L;
    return inv_sqrt_2pi * std::exp(-0.5L * x * x);
}

inline long double normal_cdf_ld(long double x) { return 0.5L * std::erfc(-x / std::sqrt(2.0L)); }

/// Upper tail P(Z > x) for large x via the Mills-ratio asymptotic series
///   phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - 945/x^10).
/// Alternating, so the truncation error is below the first omitted term
/// (about 1e-8 relative at x = 10).
inline long double upper_tail_series(long double x) {
    const long double x2 = x * x;
    long double s = 1.0L, term = 1.0L;
    for (int k = 1; k <= 5; ++k) {
        term *= -(2.0L * k - 1.0L) / x2;
        s += term;
    }
    return phi_ld(x) / x * s;
}

/// Invert a monotone function by bisection on [lo,hi].
template <class F>
long double bisect_ld(F f, long double target, long double lo, long double hi) {
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5L * (lo + hi);
}

template <class F>
double central_diff(F f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Dense-grid minimizer of f over [0, hi]: returns (argmin, min).
template <class F>
std::pair<double, double> grid_min(F f, double hi, double step) {
    double best_x = 0.0, best_v = f(0.0);
    for (double x = step; x <= hi + 0.5 * step; x += step) {
        const double v = f(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return {best_x, best_v};
}

}  // namespace oracle
