#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "cibound/config.hpp"
#include "cibound/prior.hpp"
#include "cibound/risk.hpp"
#include "cibound/roots.hpp"
#include "cibound/width.hpp"

namespace cibound {

namespace detail {

/// Everything needed to evaluate q(x; h) and dq/dx at one quadrature node h.
/// Coverage masses with nu1 == 0 contribute nothing and are dropped.
struct NodeTerms {
    double h = 0.0;
    double sel_weight = 0.0;  // 2 phi(h) + sum nu2(j) (phi(h-g2j) + phi(h+g2j))
    double t1 = 0.0;          // sel_weight / z(alpha)
    double dag_base = 0.0;    // sum wp(j) elldag(h,g1j) + wm(j) elldag(-h,g1j)
    double z = 0.0;
    double sigma = 1.0;       // sqrt(1 - rho^2)
    std::vector<double> wp;   // nu1(j) phi(h - gamma1(j))
    std::vector<double> wm;   // nu1(j) phi(h + gamma1(j))
    std::vector<double> mu_p; // b(h) - rho (h - gamma1(j))
    std::vector<double> mu_m; // b(-h) - rho (-h - gamma1(j))

    double q(double x) const {
        double v = (x / z - 1.0) * sel_weight + dag_base;
        for (std::size_t j = 0; j < wp.size(); ++j)
            v -= wp[j] * centered_interval_prob(mu_p[j], x, sigma) +
                 wm[j] * centered_interval_prob(mu_m[j], x, sigma);
        return v;
    }

    double t2(double x) const {
        double t = 0.0;
        for (std::size_t j = 0; j < wp.size(); ++j)
            t += wp[j] * (phi((mu_p[j] + x) / sigma) + phi((mu_p[j] - x) / sigma)) +
                 wm[j] * (phi((mu_m[j] + x) / sigma) + phi((mu_m[j] - x) / sigma));
        return t / sigma;
    }

    double dq(double x) const { return t1 - t2(x); }

    /// t2 is decreasing on [x_star, inf).
    double x_star() const {
        double m = 0.0;
        for (std::size_t j = 0; j < wp.size(); ++j)
            m = std::max(m, std::max(std::fabs(mu_p[j]), std::fabs(mu_m[j])));
        return m;
    }

    /// Pointwise bound on t2: each pdf pair is at most 2 phi(0).
    double t2_upper() const {
        double w = 0.0;
        for (std::size_t j = 0; j < wp.size(); ++j) w += wp[j] + wm[j];
        return w * 2.0 * phi(0.0) / sigma;
    }
};

inline NodeTerms make_node_terms(double h, const PriorPair& prior, const ProblemConfig& cfg) {
    NodeTerms t;
    t.h = h;
    t.z = cfg.z_alpha();
    const double rho = cfg.rho();
    t.sigma = std::sqrt(1.0 - rho * rho);
    t.sel_weight = 2.0 * phi(h);
    for (std::size_t j = 0; j < prior.gamma2.size(); ++j)
        t.sel_weight += prior.nu2[j] * (phi(h - prior.gamma2[j]) + phi(h + prior.gamma2[j]));
    t.t1 = t.sel_weight / t.z;
    const double bh = bias(h, cfg);
    for (std::size_t j = 0; j < prior.gamma1.size(); ++j) {
        if (!(prior.nu1[j] > 0.0)) continue;
        const double g = prior.gamma1[j];
        const double wp = prior.nu1[j] * phi(h - g);
        const double wm = prior.nu1[j] * phi(h + g);
        t.wp.push_back(wp);
        t.wm.push_back(wm);
        t.mu_p.push_back(bh - rho * (h - g));
        t.mu_m.push_back(-bh - rho * (-h - g));
        t.dag_base += wp * centered_interval_prob(-rho * (h - g), t.z, t.sigma) +
                      wm * centered_interval_prob(-rho * (-h - g), t.z, t.sigma);
    }
    return t;
}

/// Upper end of the interval that must contain a minimizer of q:
/// dq/dx > 0 for all x >= x_tilde.
inline double x_tilde(const NodeTerms& t) {
    if (t.wp.empty()) return 0.0;
    const double xs = t.x_star();
    if (t.dq(xs) > 0.0) return xs;
    double lo = xs, hi = xs + 1.0;
    while (t.dq(hi) <= 0.0) {
        hi = xs + 2.0 * (hi - xs);
        if (hi > xs + 50.0)
            throw std::runtime_error("x_tilde: no sign change of dq/dx in [x*, x*+50]");
    }
    return find_root([&t](double x) { return t.dq(x); }, lo, hi, 1e-12);
}

struct QMin {
    double x = 0.0;
    double value = 0.0;
};

/// Two-step pointwise minimizer of q(.; h): locate all local minimizers via
/// the sign pattern of dq/dx on the step-0.1 grid over [0, x_tilde] (Case 1
/// at x = 0, Case 2 at interior sign changes, roots polished by Brent), then
/// take the smallest q value. Ties within 1e-12 go to the smallest x.
inline QMin minimize_q(const NodeTerms& t) {
    constexpr double kZeroBand = 1e-12;
    constexpr double kTieBand = 1e-12;
    if (t.wp.empty() || t.t2_upper() < t.t1) return {0.0, t.q(0.0)};

    const double xt = x_tilde(t);
    const int w = static_cast<int>(std::ceil(10.0 * xt));
    std::vector<double> grid(static_cast<std::size_t>(w) + 1);
    std::vector<double> dq(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = 0.1 * static_cast<double>(i);
        dq[i] = t.dq(grid[i]);
    }

    std::vector<double> minimizers;
    // Case 1: x = 0
    if (dq[0] > kZeroBand ||
        (std::fabs(dq[0]) <= kZeroBand && grid.size() > 1 && dq[1] > kZeroBand))
        minimizers.push_back(0.0);
    // Case 2: interior sign changes
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (dq[i] < -kZeroBand && dq[i + 1] > kZeroBand) {
            minimizers.push_back(find_root([&t](double x) { return t.dq(x); }, grid[i],
                                           grid[i + 1], 1e-12));
        } else if (std::fabs(dq[i]) <= kZeroBand && i > 0 && dq[i - 1] < -kZeroBand &&
                   dq[i + 1] > kZeroBand) {
            minimizers.push_back(grid[i]);
        }
    }
    if (minimizers.empty()) {
        // band logic can swallow a grazing sign change; fall back to the grid
        QMin best{0.0, t.q(0.0)};
        for (double x : grid) {
            const double v = t.q(x);
            if (v < best.value - kTieBand) best = {x, v};
        }
        return best;
    }
    QMin best{minimizers.front(), t.q(minimizers.front())};
    for (std::size_t i = 1; i < minimizers.size(); ++i) {
        const double v = t.q(minimizers[i]);
        if (v < best.value - kTieBand) best = {minimizers[i], v};
    }
    return best;
}

}  // namespace detail

/// Integrand q(x; h, gamma, nu): the SEL term plus the coverage penalty.
inline double integrand_q(double x, double h, const PriorPair& prior, const ProblemConfig& cfg) {
    if (!(x >= 0.0)) throw std::domain_error("integrand_q: x must be >= 0");
    return detail::make_node_terms(h, prior, cfg).q(x);
}

/// dq/dx = t1 - t2(x), the closed-form derivative of integrand_q in x.
inline double dq_dx(double x, double h, const PriorPair& prior, const ProblemConfig& cfg) {
    if (!(x >= 0.0)) throw std::domain_error("dq_dx: x must be >= 0");
    return detail::make_node_terms(h, prior, cfg).dq(x);
}

/// x* = max_j max(|mu(h,rho,gamma1(j))|, |mu(-h,rho,gamma1(j))|) over the
/// coverage masses with nu1(j) > 0; t2 is decreasing beyond it. 0 if none.
inline double x_star(double h, const PriorPair& prior, const ProblemConfig& cfg) {
    return detail::make_node_terms(h, prior, cfg).x_star();
}

/// Smallest point beyond which dq/dx stays positive (see x_star).
inline double x_tilde(double h, const PriorPair& prior, const ProblemConfig& cfg) {
    return detail::x_tilde(detail::make_node_terms(h, prior, cfg));
}

struct QMinimum {
    double x_min = 0.0;
    double q_min = 0.0;
};

/// Global minimizer of q(.; h, gamma, nu) over x >= 0.
inline QMinimum minimize_q(double h, const PriorPair& prior, const ProblemConfig& cfg) {
    const auto m = detail::minimize_q(detail::make_node_terms(h, prior, cfg));
    return {m.x, m.value};
}

namespace detail {

inline std::vector<QMin> minimize_all(const PriorPair& prior, const ProblemConfig& cfg,
                                      const CompositeRule& rule) {
    prior.validate();
    std::vector<QMin> out(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        out[i] = minimize_q(make_node_terms(rule.nodes[i], prior, cfg));
    return out;
}

}  // namespace detail

/// The width function s(gamma, nu) that minimizes g~ for this prior:
/// pointwise argmin of q at each quadrature node, tail z(alpha).
inline WidthFunction width_of_prior(const PriorPair& prior, const ProblemConfig& cfg) {
    const CompositeRule rule = cfg.rule();
    const auto mins = detail::minimize_all(prior, cfg, rule);
    std::vector<double> vals(mins.size());
    for (std::size_t i = 0; i < mins.size(); ++i) vals[i] = mins[i].x;
    return WidthFunction(rule.nodes, std::move(vals), cfg.z_alpha(), cfg.c());
}

/// g~(s(gamma,nu), gamma, nu) = integral over [0,c] of min_x q(x; h).
inline double g_tilde(const PriorPair& prior, const ProblemConfig& cfg,
                      const CompositeRule& rule) {
    const auto mins = detail::minimize_all(prior, cfg, rule);
    double acc = 0.0;
    for (std::size_t i = 0; i < mins.size(); ++i) acc += rule.weights[i] * mins[i].value;
    return acc;
}

inline double g_tilde(const PriorPair& prior, const ProblemConfig& cfg) {
    return g_tilde(prior, cfg, cfg.rule());
}

/// g~(s, gamma, nu) for a GIVEN width function s (no minimization).
template <class W>
double g_tilde_for(const W& s, const PriorPair& prior, const ProblemConfig& cfg) {
    prior.validate();
    const CompositeRule rule = cfg.rule();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double h = rule.nodes[i];
        acc += rule.weights[i] * detail::make_node_terms(h, prior, cfg).q(s(h));
    }
    return acc;
}

/// Lower bound on inf e(0;s) subject to (C1)/(C2):
/// LB(u) = 1 + g~ - (sum nu2) * u. Valid for any feasible prior.
inline double lower_bound(double u, const PriorPair& prior, const ProblemConfig& cfg) {
    if (!(u > 0.0)) throw std::domain_error("lower_bound: u must be > 0");
    return 1.0 + g_tilde(prior, cfg) - prior.nu2_sum() * u;
}

/// u** = (g~ - margin) / sum(nu2); the margin encodes the 1.005 threshold.
inline double u_star_star_from(double g_tilde_value, double nu2_sum, double margin = 0.005) {
    if (!(nu2_sum > 0.0)) throw std::domain_error("u_star_star: sum of nu2 must be > 0");
    return (g_tilde_value - margin) / nu2_sum;
}

inline double u_star_star(const PriorPair& prior, const ProblemConfig& cfg,
                          double margin = 0.005) {
    return u_star_star_from(g_tilde(prior, cfg), prior.nu2_sum(), margin);
}

struct GainLoss {
    double gain_upper_bound = std::numeric_limits<double>::quiet_NaN();
    double loss = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
};

/// gain upper bound 1 - lb^2 (defined for lb > 0), loss = u^2 + 2u.
inline GainLoss gain_loss(double lb, double u) {
    if (!(u > 0.0)) throw std::domain_error("gain_loss: u must be > 0");
    GainLoss g;
    g.loss = u * u + 2.0 * u;
    if (lb > 0.0 && std::isfinite(lb)) {
        g.gain_upper_bound = 1.0 - lb * lb;
        g.ratio = g.gain_upper_bound / g.loss;
    }
    return g;
}

/// Diagnostics carried along with a bound computation.
struct BoundDiagnostics {
    double alpha = 0.0;
    double alpha_tilde = 0.0;
    double rho = 0.0;
    int m1 = 0;
    int m2 = 0;
    QuadratureSpec quad;
    double margin = 0.005;
    std::uint64_t seed = 0;
    int starts = 0;
    long iterations = 0;
    int best_start = -1;

    nlohmann::json to_json() const {
        return {{"alpha", alpha},
                {"alphaTilde", alpha_tilde},
                {"rho", rho},
                {"m1", m1},
                {"m2", m2},
                {"quad", {{"panels", quad.panels}, {"nodesPerPanel", quad.nodes_per_panel}}},
                {"margin", margin},
                {"seed", seed},
                {"starts", starts},
                {"iterations", iterations},
                {"bestStart", best_start}};
    }
};

/// One Table-1/Table-2 style row: the prior, its g~, the bound at u, u**,
/// and the gain/loss summary.
struct BoundResult {
    PriorPair prior;
    double u = 0.0;
    double g_tilde = 0.0;
    double nu2_sum = 0.0;
    double lb = 0.0;
    double u_star_star = std::numeric_limits<double>::quiet_NaN();
    double gain_upper_bound = std::numeric_limits<double>::quiet_NaN();
    double loss = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    BoundDiagnostics diagnostics;

    nlohmann::json to_json() const {
        auto num = [](double v) {
            return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
        };
        return {{"prior", prior.to_json()},
                {"u", u},
                {"gTilde", g_tilde},
                {"nu2Sum", nu2_sum},
                {"lb", lb},
                {"uStarStar", num(u_star_star)},
                {"gainUpperBound", num(gain_upper_bound)},
                {"loss", loss},
                {"ratio", num(ratio)},
                {"diagnostics", diagnostics.to_json()}};
    }
};

/// Assemble a BoundResult for a known prior at a given u.
inline BoundResult evaluate_bound(double u, const PriorPair& prior, const ProblemConfig& cfg,
                                  double margin = 0.005) {
    if (!(u > 0.0)) throw std::domain_error("evaluate_bound: u must be > 0");
    BoundResult r;
    r.prior = prior;
    r.u = u;
    r.g_tilde = g_tilde(prior, cfg);
    r.nu2_sum = prior.nu2_sum();
    r.lb = 1.0 + r.g_tilde - r.nu2_sum * u;
    if (r.nu2_sum > 0.0) r.u_star_star = u_star_star_from(r.g_tilde, r.nu2_sum, margin);
    const GainLoss gl = gain_loss(r.lb, u);
    r.gain_upper_bound = gl.gain_upper_bound;
    r.loss = gl.loss;
    r.ratio = gl.ratio;
    r.diagnostics.alpha = cfg.alpha();
    r.diagnostics.alpha_tilde = cfg.alpha_tilde();
    r.diagnostics.rho = cfg.rho();
    r.diagnostics.m1 = static_cast<int>(prior.gamma1.size());
    r.diagnostics.m2 = static_cast<int>(prior.gamma2.size());
    r.diagnostics.quad = cfg.quad();
    r.diagnostics.margin = margin;
    return r;
}

}  // namespace cibound
