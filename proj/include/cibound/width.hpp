#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "cibound/config.hpp"
#include "cibound/smoothing.hpp"

namespace cibound {

/// A member of the class D of half-width functions: even, nonnegative,
/// equal to a constant tail for |x| >= c. Inside [0,c) the function is
/// stored as values on an increasing node set and evaluated as a step
/// function over the nodes' midpoint cells. Risk and bound computations
/// only ever read the values at quadrature nodes, so the inter-node rule
/// exists to make evaluation total (Monte Carlo draws land anywhere).
class WidthFunction {
  public:
    WidthFunction(std::vector<double> nodes, std::vector<double> values, double tail,
                  double c = 10.0)
        : nodes_(std::move(nodes)), values_(std::move(values)), tail_(tail), c_(c) {
        if (nodes_.empty() || nodes_.size() != values_.size())
            throw std::invalid_argument("WidthFunction: nodes/values size mismatch");
        if (!(tail_ >= 0.0)) throw std::invalid_argument("WidthFunction: tail must be >= 0");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (!(values_[i] >= 0.0))
                throw std::invalid_argument("WidthFunction: values must be >= 0");
            if (!(nodes_[i] >= 0.0 && nodes_[i] <= c_))
                throw std::invalid_argument("WidthFunction: nodes must lie in [0,c]");
            if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
                throw std::invalid_argument("WidthFunction: nodes must be strictly increasing");
        }
    }

    double operator()(double x) const {
        x = std::fabs(x);
        if (x >= c_) return tail_;
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
        if (it == nodes_.begin()) return values_.front();
        if (it == nodes_.end()) return values_.back();
        const auto i = static_cast<std::size_t>(it - nodes_.begin());
        // nearest node wins; the midpoint itself belongs to the lower cell
        return (x - nodes_[i - 1] <= nodes_[i] - x) ? values_[i - 1] : values_[i];
    }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    double tail() const { return tail_; }
    double cutoff() const { return c_; }

    nlohmann::json to_json() const {
        return {{"nodes", nodes_}, {"values", values_}, {"tail", tail_}, {"c", c_}};
    }

    static WidthFunction from_json(const nlohmann::json& j) {
        return WidthFunction(j.at("nodes").get<std::vector<double>>(),
                             j.at("values").get<std::vector<double>>(),
                             j.at("tail").get<double>(), j.value("c", 10.0));
    }

  private:
    std::vector<double> nodes_;
    std::vector<double> values_;
    double tail_;
    double c_;
};

/// Smooth half-width of the sd_delta interval: s(x) = z(alpha) * r_delta(x).
struct SdDeltaProfile {
    double z_alpha;
    double rho;
    double d;
    double operator()(double x) const { return z_alpha * r_delta(x, rho, d); }
};

inline SdDeltaProfile sd_delta_profile(const ProblemConfig& cfg) {
    return SdDeltaProfile{cfg.z_alpha(), cfg.rho(), cfg.d()};
}

/// sd_delta width sampled on the quadrature nodes, tail z(alpha).
inline WidthFunction sd_delta_width(const ProblemConfig& cfg) {
    const CompositeRule rule = cfg.rule();
    std::vector<double> vals(rule.nodes.size());
    const SdDeltaProfile s = sd_delta_profile(cfg);
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = s(rule.nodes[i]);
    return WidthFunction(rule.nodes, std::move(vals), cfg.z_alpha(), cfg.c());
}

/// Width constant on [0,c) with the class-D tail z(alpha) beyond c.
/// Default interior value z(alpha) gives the full-model interval s == z(alpha).
inline WidthFunction constant_width(const ProblemConfig& cfg, double value) {
    const CompositeRule rule = cfg.rule();
    return WidthFunction(rule.nodes, std::vector<double>(rule.nodes.size(), value),
                         cfg.z_alpha(), cfg.c());
}

inline WidthFunction constant_width(const ProblemConfig& cfg) {
    return constant_width(cfg, cfg.z_alpha());
}

}  // namespace cibound
