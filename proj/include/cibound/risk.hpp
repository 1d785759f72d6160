#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cibound/config.hpp"
#include "cibound/normal.hpp"
#include "cibound/quadrature.hpp"
#include "cibound/smoothing.hpp"
#include "cibound/width.hpp"

namespace cibound {

namespace detail {

/// P(-x <= N(mu, sigma^2) <= x) = Phi((mu+x)/sigma) - Phi((mu-x)/sigma).
/// Even in mu; nondecreasing in x >= 0.
inline double centered_interval_prob(double mu, double x, double sigma) {
    return normal_cdf((mu + x) / sigma) - normal_cdf((mu - x) / sigma);
}

}  // namespace detail

/// ell(h, gamma; x) = P(b(h) - x <= G~ <= b(h) + x) for
/// G~ ~ N(rho*(h-gamma), 1-rho^2).
inline double ell(double h, double gamma, double x, const ProblemConfig& cfg) {
    if (!(x >= 0.0)) throw std::domain_error("ell: x must be >= 0");
    const double sigma = std::sqrt(1.0 - cfg.rho() * cfg.rho());
    const double mu = bias(h, cfg) - cfg.rho() * (h - gamma);
    return detail::centered_interval_prob(mu, x, sigma);
}

/// ell_dag(h, gamma) = P(-z(alpha) <= G~ <= z(alpha)) for the same G~.
inline double ell_dag(double h, double gamma, const ProblemConfig& cfg) {
    const double sigma = std::sqrt(1.0 - cfg.rho() * cfg.rho());
    return detail::centered_interval_prob(-cfg.rho() * (h - gamma), cfg.z_alpha(), sigma);
}

/// R1(s, gamma): the coverage deficit of CI(s), so that
/// coverage(gamma) = 1 - alpha - R1. Even in gamma and in rho.
template <class W>
double coverage_deficit(const W& s, double gamma, const ProblemConfig& cfg,
                        const CompositeRule& rule) {
    const double rho = cfg.rho();
    const double sigma = std::sqrt(1.0 - rho * rho);
    const double z = cfg.z_alpha();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double h = rule.nodes[i];
        const double sh = s(h);
        const double bh = bias(h, cfg);
        const double mu_p = bh - rho * (h - gamma);
        const double mu_m = -bh - rho * (-h - gamma);
        const double f =
            (detail::centered_interval_prob(-rho * (h - gamma), z, sigma) -
             detail::centered_interval_prob(mu_p, sh, sigma)) *
                phi(h - gamma) +
            (detail::centered_interval_prob(-rho * (-h - gamma), z, sigma) -
             detail::centered_interval_prob(mu_m, sh, sigma)) *
                phi(h + gamma);
        acc += rule.weights[i] * f;
    }
    return acc;
}

/// R2(s, gamma): scaled expected length minus one. Even in gamma, free of rho.
template <class W>
double sel_excess(const W& s, double gamma, const ProblemConfig& cfg, const CompositeRule& rule) {
    const double z = cfg.z_alpha();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double h = rule.nodes[i];
        acc += rule.weights[i] * (s(h) / z - 1.0) * (phi(h - gamma) + phi(h + gamma));
    }
    return acc;
}

template <class W>
double coverage_deficit(const W& s, double gamma, const ProblemConfig& cfg) {
    return coverage_deficit(s, gamma, cfg, cfg.rule());
}

template <class W>
double sel_excess(const W& s, double gamma, const ProblemConfig& cfg) {
    return sel_excess(s, gamma, cfg, cfg.rule());
}

template <class W>
double coverage_probability(const W& s, double gamma, const ProblemConfig& cfg,
                            const CompositeRule& rule) {
    return 1.0 - cfg.alpha() - coverage_deficit(s, gamma, cfg, rule);
}

template <class W>
double scaled_expected_length(const W& s, double gamma, const ProblemConfig& cfg,
                              const CompositeRule& rule) {
    return 1.0 + sel_excess(s, gamma, cfg, rule);
}

/// Coverage and SEL sampled over a gamma grid.
struct RiskCurve {
    std::vector<double> gamma;
    std::vector<double> coverage;
    std::vector<double> sel;

    nlohmann::json to_json() const {
        return {{"gamma", gamma}, {"coverage", coverage}, {"sel", sel}};
    }

    /// CSV rows gamma,coverage,sel with 8 significant digits.
    std::string to_csv() const {
        std::string out = "gamma,coverage,sel\n";
        char buf[96];
        for (std::size_t i = 0; i < gamma.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.8g,%.8g,%.8g\n", gamma[i], coverage[i], sel[i]);
            out += buf;
        }
        return out;
    }
};

template <class W>
RiskCurve risk_curve(const W& s, const std::vector<double>& gamma_grid,
                     const ProblemConfig& cfg) {
    if (gamma_grid.empty()) throw std::invalid_argument("risk_curve: empty gamma grid");
    for (double g : gamma_grid)
        if (!(g >= 0.0)) throw std::invalid_argument("risk_curve: gamma grid must be >= 0");
    const CompositeRule rule = cfg.rule();
    RiskCurve curve;
    curve.gamma = gamma_grid;
    curve.coverage.reserve(gamma_grid.size());
    curve.sel.reserve(gamma_grid.size());
    for (double g : gamma_grid) {
        curve.coverage.push_back(coverage_probability(s, g, cfg, rule));
        curve.sel.push_back(scaled_expected_length(s, g, cfg, rule));
    }
    return curve;
}

}  // namespace cibound
