#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fragscope/errors.hpp"

namespace fragscope {

// Adaptive Gauss-Kronrod 15(7) quadrature with absolute tolerance and
// worst-interval bisection. Integrands in this project are smooth away from
// the endpoints; endpoint singularities are removed by substitution or
// series before this routine sees them, so moderate depth suffices.

namespace detail {

// Nonnegative abscissae of the 15-point Kronrod rule and its weights; the
// embedded 7-point Gauss rule sits on the odd-indexed abscissae.
inline constexpr double gk15_xgk[8] = {
    0.9914553711208126392068546975263285,
    0.9491079123427585245261896840478513,
    0.8648644233597690727897127886409262,
    0.7415311855993944398638647732807884,
    0.5860872354676911302941448382587296,
    0.4058451513773971669066064120769615,
    0.2077849550078984676006894037732449,
    0.0000000000000000000000000000000000};

inline constexpr double gk15_wgk[8] = {
    0.0229353220105292249637320080589695,
    0.0630920926299785532907006631892042,
    0.1047900103222501838398763225415180,
    0.1406532597155259187451895905102379,
    0.1690047266392679028265834265985503,
    0.1903505780647854099132564024210137,
    0.2044329400752988924141619992346491,
    0.2094821410847278280129991748917143};

inline constexpr double gk15_wg[4] = {
    0.1294849661688696932706114326790820,
    0.2797053914892766679014677714237796,
    0.3818300505051189449503697754889751,
    0.4179591836734693877551020408163265};

struct PanelResult {
    double value;
    double error;
};

template <typename F>
PanelResult gk15_panel(const F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double fc = f(centre);
    double resg = fc * gk15_wg[3];
    double resk = fc * gk15_wgk[7];
    for (int j = 0; j < 3; ++j) {
        const int jtw = 2 * j + 1;
        const double dx = half * gk15_xgk[jtw];
        const double fsum = f(centre - dx) + f(centre + dx);
        resg += gk15_wg[j] * fsum;
        resk += gk15_wgk[jtw] * fsum;
    }
    for (int j = 0; j < 4; ++j) {
        const int jtwm1 = 2 * j;
        const double dx = half * gk15_xgk[jtwm1];
        resk += gk15_wgk[jtwm1] * (f(centre - dx) + f(centre + dx));
    }
    return PanelResult{resk * half, std::fabs((resk - resg) * half)};
}

} // namespace detail

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
};

// Integrate f over [a, b] to absolute tolerance abs_tol. Throws
// InvariantError if the tolerance cannot be met within max_panels.
template <typename F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                           std::size_t max_panels = 4000) {
    struct Interval {
        double a, b, value, error;
    };
    if (!(b > a)) {
        if (b == a) return QuadratureResult{0.0, 0.0, 0};
        throw PreconditionError("integrate: inverted interval");
    }

    std::vector<Interval> heap;
    auto less_error = [](const Interval& x, const Interval& y) { return x.error < y.error; };
    auto first = detail::gk15_panel(f, a, b);
    heap.push_back(Interval{a, b, first.value, first.error});

    double total_value = first.value;
    double total_error = first.error;
    std::size_t panels = 1;

    while (total_error > abs_tol && panels < max_panels) {
        std::pop_heap(heap.begin(), heap.end(), less_error);
        const Interval worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // interval at floating-point resolution; retire it as converged
            total_error = std::max(0.0, total_error - worst.error);
            heap.push_back(worst);
            heap.back().error = 0.0;
            std::push_heap(heap.begin(), heap.end(), less_error);
            continue;
        }
        auto left = detail::gk15_panel(f, worst.a, mid);
        auto right = detail::gk15_panel(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push_back(Interval{worst.a, mid, left.value, left.error});
        std::push_heap(heap.begin(), heap.end(), less_error);
        heap.push_back(Interval{mid, worst.b, right.value, right.error});
        std::push_heap(heap.begin(), heap.end(), less_error);
        ++panels;
    }
    if (total_error > abs_tol * 16.0)
        throw InvariantError("integrate: quadrature tolerance not reached");
    return QuadratureResult{total_value, total_error, panels};
}

} // namespace fragscope
