#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace cibound {

// Brent's method on [a,b]; f(a) and f(b) must bracket a sign change.
template <class F>
double find_root(F&& f, double a, double b, double xtol = 1e-13, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("find_root: interval does not bracket a sign change");

    double c = a, fc = fa;
    double e = b - a, dd = e;
    for (int it = 0; it < max_iter; ++it) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            e = dd = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // inverse quadratic / secant step
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = dd;
                dd = p / q;
            } else {
                dd = xm;
                e = dd;
            }
        } else {
            dd = xm;
            e = dd;
        }
        a = b;
        fa = fb;
        b += (std::fabs(dd) > tol1) ? dd : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

}  // namespace cibound
