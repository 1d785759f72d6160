#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cibound {

struct QuadratureSpec {
    int panels = 40;
    int nodes_per_panel = 10;
};

inline bool operator==(const QuadratureSpec& a, const QuadratureSpec& b) {
    return a.panels == b.panels && a.nodes_per_panel == b.nodes_per_panel;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::fabs(z - z1) > 1e-15);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

/// Fixed-node composite rule on [lo,hi]: `panels` equal panels, each carrying
/// a Gauss-Legendre rule with `nodes_per_panel` points.
struct CompositeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = 0.0;
    double hi = 0.0;
};

inline CompositeRule make_rule(const QuadratureSpec& spec, double lo, double hi) {
    if (spec.panels < 1 || spec.nodes_per_panel < 1)
        throw std::invalid_argument("make_rule: panels and nodes_per_panel must be >= 1");
    if (!(hi > lo)) throw std::invalid_argument("make_rule: need hi > lo");
    std::vector<double> xg, wg;
    gauss_legendre(spec.nodes_per_panel, xg, wg);
    CompositeRule rule;
    rule.lo = lo;
    rule.hi = hi;
    rule.nodes.reserve(static_cast<std::size_t>(spec.panels) * spec.nodes_per_panel);
    rule.weights.reserve(rule.nodes.capacity());
    const double width = (hi - lo) / spec.panels;
    for (int p = 0; p < spec.panels; ++p) {
        const double a = lo + p * width;
        const double mid = a + 0.5 * width;
        for (int j = 0; j < spec.nodes_per_panel; ++j) {
            rule.nodes.push_back(mid + 0.5 * width * xg[j]);
            rule.weights.push_back(0.5 * width * wg[j]);
        }
    }
    return rule;
}

template <class F>
double integrate(F&& f, const CompositeRule& rule) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
    return acc;
}

}  // namespace cibound
