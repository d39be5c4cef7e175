#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "fragscope/errors.hpp"

namespace fragscope {

// Brent's method on a bracketing interval. fa and fb must have opposite
// signs; the caller establishes the bracket (see bracket_upward).
template <typename F>
double brent_root(const F& f, double a, double b, double fa, double fb,
                  double xtol = 1e-14, int max_iter = 200) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw PreconditionError("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

// Expand the upper endpoint by doubling until f changes sign. On failure,
// reports a diagnostic grid of f values in the exception message.
template <typename F>
double find_root_expanding(const F& f, double lo, double hi0, double hi_max,
                           const std::string& what) {
    const double flo = f(lo);
    double hi = hi0;
    double fhi = f(hi);
    while ((flo > 0) == (fhi > 0) && hi < hi_max) {
        hi = std::min(hi * 2.0, hi_max);
        fhi = f(hi);
    }
    if ((flo > 0) == (fhi > 0)) {
        std::ostringstream msg;
        msg << "bracket-failure in " << what << ": no sign change on [" << lo << ", " << hi_max << "];"
            << " diagnostic grid:";
        for (int i = 0; i <= 8; ++i) {
            const double x = lo + (hi_max - lo) * i / 8.0;
            msg << " f(" << x << ")=" << f(x);
        }
        throw PreconditionError(msg.str());
    }
    return brent_root(f, lo, hi, flo, fhi);
}

} // namespace fragscope
