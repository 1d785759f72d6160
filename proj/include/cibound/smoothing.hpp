#pragma once

#include <cassert>
#include <cmath>

#include "cibound/config.hpp"
#include "cibound/normal.hpp"

namespace cibound {

/// k(gamma) = phi(d+gamma) - phi(d-gamma) + gamma*(Phi(d-gamma) - Phi(-d-gamma)).
/// Odd in gamma; vanishes rapidly beyond |gamma| ~ d + 8.
inline double smoothing_k(double gamma, double d) {
    return phi(d + gamma) - phi(d - gamma) +
           gamma * (normal_cdf(d - gamma) - normal_cdf(-d - gamma));
}

/// Efron's q: q(gamma) = Phi(d-gamma) - Phi(-d-gamma) - d*(phi(d+gamma) + phi(d-gamma)).
/// Even in gamma; tends to 0 as |gamma| grows.
inline double q_efron(double gamma, double d) {
    return normal_cdf(d - gamma) - normal_cdf(-d - gamma) -
           d * (phi(d + gamma) + phi(d - gamma));
}

/// Delta-method width factor: sqrt(1 - 2 rho^2 q + rho^2 q^2).
/// The radicand equals (1 - rho^2 q)^2 + rho^2 q^2 (1 - rho^2) >= 0.
inline double r_delta(double gamma, double rho, double d) {
    const double q = q_efron(gamma, d);
    const double radicand = 1.0 - rho * rho * q * (2.0 - q);
    assert(radicand >= 0.0);
    return std::sqrt(radicand);
}

/// Centre-shift function b(x) = rho*k(x), truncated to exactly 0 for |x| >= c.
inline double bias(double x, const ProblemConfig& cfg) {
    if (std::fabs(x) >= cfg.c()) return 0.0;
    return cfg.rho() * smoothing_k(x, cfg.d());
}

}  // namespace cibound
