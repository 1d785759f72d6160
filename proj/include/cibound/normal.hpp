#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cibound/roots.hpp"

namespace cibound {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Standard normal density.
inline double phi(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

/// Standard normal CDF via erfc; absolute error well below 1e-12 on [-37,37].
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

/// z(a) = Phi^{-1}(1 - a/2) for a in (0,1).
/// Solved by bracketed root finding on normal_cdf so that the quantile
/// round-trips through the CDF by construction.
inline double z_quantile(double a) {
    if (!(a > 0.0 && a < 1.0))
        throw std::domain_error("z_quantile: a must lie in (0,1)");
    const double target = 1.0 - 0.5 * a;
    return find_root([target](double x) { return normal_cdf(x) - target; }, -40.0, 40.0, 1e-14);
}

}  // namespace cibound
