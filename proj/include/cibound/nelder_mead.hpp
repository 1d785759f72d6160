#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace cibound {

struct NelderMeadOptions {
    long max_iterations = 2000;
    // stop when the best value improves by less than improvement_tol
    // over improvement_window consecutive iterations
    double improvement_tol = 1e-6;
    int improvement_window = 50;
    double initial_step = 0.25;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    long iterations = 0;
    std::vector<double> best_trace;  // best value seen, one entry per iteration
};

/// Downhill simplex minimization of f: R^n -> R.
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0,
                             const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    const double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> ord(n + 1);
    auto sorted = [&] {
        std::iota(ord.begin(), ord.end(), std::size_t{0});
        std::stable_sort(ord.begin(), ord.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    NelderMeadResult res;
    double window_ref = std::numeric_limits<double>::infinity();
    long window_start = 0;
    for (long it = 0; it < opt.max_iterations; ++it) {
        sorted();
        const std::size_t best = ord[0], worst = ord[n], second = ord[n - 1];
        res.best_trace.push_back(fv[best]);
        res.iterations = it + 1;

        if (it - window_start >= opt.improvement_window) {
            if (window_ref - fv[best] < opt.improvement_tol) break;
            window_ref = fv[best];
            window_start = it;
        }
        if (!std::isfinite(window_ref)) window_ref = fv[best];

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
            return p;
        };

        std::vector<double> xr = blend(-alpha);
        const double fr = f(xr);
        if (fr < fv[best]) {
            std::vector<double> xe = blend(-gamma);
            const double fe = f(xe);
            if (fe < fr) {
                pts[worst] = std::move(xe);
                fv[worst] = fe;
            } else {
                pts[worst] = std::move(xr);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            pts[worst] = std::move(xr);
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            std::vector<double> xc = blend(outside ? -beta : beta);
            const double fc = f(xc);
            if (fc < (outside ? fr : fv[worst])) {
                pts[worst] = std::move(xc);
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < n; ++k)
                        pts[i][k] = pts[best][k] + delta * (pts[i][k] - pts[best][k]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }
    sorted();
    res.x = pts[ord[0]];
    res.value = fv[ord[0]];
    return res;
}

}  // namespace cibound
