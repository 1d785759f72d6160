#pragma once

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "cibound/normal.hpp"
#include "cibound/quadrature.hpp"

namespace cibound {

/// Fixed scenario parameters: nominal non-coverage alpha, preliminary-test
/// size alpha_tilde, correlation rho, truncation constant c and the
/// quadrature layout on [0,c]. The test cutoff d and z(alpha) are derived.
class ProblemConfig {
  public:
    ProblemConfig(double alpha, double alpha_tilde, double rho, double c = 10.0,
                  QuadratureSpec quad = {})
        : alpha_(alpha), alpha_tilde_(alpha_tilde), rho_(rho), c_(c), quad_(quad) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("ProblemConfig: alpha not in (0,1)");
        if (!(alpha_tilde > 0.0 && alpha_tilde < 1.0))
            throw std::domain_error("ProblemConfig: alphaTilde not in (0,1)");
        if (!(std::fabs(rho) < 1.0)) throw std::domain_error("ProblemConfig: |rho| must be < 1");
        if (!(c >= 10.0)) throw std::domain_error("ProblemConfig: c must be >= 10");
        d_ = z_quantile(alpha_tilde);
        z_alpha_ = z_quantile(alpha);
    }

    double alpha() const { return alpha_; }
    double alpha_tilde() const { return alpha_tilde_; }
    double rho() const { return rho_; }
    double c() const { return c_; }
    const QuadratureSpec& quad() const { return quad_; }

    /// Size-alpha_tilde cutoff: the null is accepted when |gamma_hat| <= d.
    double d() const { return d_; }
    double z_alpha() const { return z_alpha_; }

    CompositeRule rule() const { return make_rule(quad_, 0.0, c_); }

    nlohmann::json to_json() const {
        return {{"alpha", alpha_},
                {"alphaTilde", alpha_tilde_},
                {"rho", rho_},
                {"c", c_},
                {"quad", {{"panels", quad_.panels}, {"nodesPerPanel", quad_.nodes_per_panel}}}};
    }

    static ProblemConfig from_json(const nlohmann::json& j) {
        QuadratureSpec q;
        if (j.contains("quad")) {
            q.panels = j.at("quad").value("panels", 40);
            q.nodes_per_panel = j.at("quad").value("nodesPerPanel", 10);
        }
        return ProblemConfig(j.at("alpha").get<double>(), j.at("alphaTilde").get<double>(),
                             j.at("rho").get<double>(), j.value("c", 10.0), q);
    }

  private:
    double alpha_;
    double alpha_tilde_;
    double rho_;
    double c_;
    QuadratureSpec quad_;
    double d_;
    double z_alpha_;
};

}  // namespace cibound
