#include "fragscope/exponent.hpp"

#include <cmath>
#include <limits>

#include "fragscope/errors.hpp"
#include "fragscope/quadrature.hpp"
#include "fragscope/roots.hpp"

namespace fragscope {

namespace {

constexpr double kQuadTol = 1e-12;

void check_domain(const DislocationModel& model, double p) {
    if (!(p > model.p_lower()))
        throw PreconditionError("divergent-exponent: p at or below the finiteness boundary of " +
                                model.kind_name());
}

// ---- binary-uniform closed forms on the truncated region (eps, 1-eps) ----
//
// Phi_eps(p) = (1 - 2 eps) - 2 * J(p+1)   with J(q) = int_eps^{1-eps} s^q ds,
// and both derivatives come from int s^q (log s)^k ds in closed form.

double bu_powint(double x, double q) {          // int_0^x s^q ds
    return std::pow(x, q + 1.0) / (q + 1.0);
}
double bu_powint_log(double x, double q) {      // int_0^x s^q log s ds
    if (x == 0.0) return 0.0;
    const double xp = std::pow(x, q + 1.0);
    const double L = std::log(x);
    return xp * (L / (q + 1.0) - 1.0 / ((q + 1.0) * (q + 1.0)));
}
double bu_powint_log2(double x, double q) {     // int_0^x s^q (log s)^2 ds
    if (x == 0.0) return 0.0;
    const double xp = std::pow(x, q + 1.0);
    const double L = std::log(x);
    const double q1 = q + 1.0;
    return xp * (L * L / q1 - 2.0 * L / (q1 * q1) + 2.0 / (q1 * q1 * q1));
}

double phi_binary_uniform(double p, double eps) {
    const double q = p + 1.0;
    return (1.0 - 2.0 * eps) - 2.0 * (bu_powint(1.0 - eps, q) - bu_powint(eps, q));
}

PhiDerivatives phi_derivs_binary_uniform(double p, double eps) {
    const double q = p + 1.0;
    PhiDerivatives d;
    d.d1 = -2.0 * (bu_powint_log(1.0 - eps, q) - bu_powint_log(eps, q));
    d.d2 = -2.0 * (bu_powint_log2(1.0 - eps, q) - bu_powint_log2(eps, q));
    return d;
}

// ---- ternary and custom-finite: exact atom sums ----

double phi_ternary(double p) { return 1.0 - std::exp(-p * std::log(3.0)); }

PhiDerivatives phi_derivs_ternary(double p) {
    const double L = std::log(3.0);
    const double e = std::exp(-p * L);
    return PhiDerivatives{e * L, -e * L * L};
}

double phi_custom(const DislocationModel& model, double p, double eps) {
    double acc = 0.0;
    for (const auto& atom : model.atoms) {
        if (1.0 - atom.sizes.front() <= eps) continue;
        double inner = 1.0;
        for (double s : atom.sizes) inner -= std::pow(s, p + 1.0);
        acc += atom.rate * inner;
    }
    return acc;
}

PhiDerivatives phi_derivs_custom(const DislocationModel& model, double p, double eps) {
    PhiDerivatives d;
    for (const auto& atom : model.atoms) {
        if (1.0 - atom.sizes.front() <= eps) continue;
        double d1 = 0.0, d2 = 0.0;
        for (double s : atom.sizes) {
            const double w = std::pow(s, p + 1.0);
            const double L = std::log(s);
            d1 += w * (-L);
            d2 -= w * L * L;
        }
        d.d1 += atom.rate * d1;
        d.d2 += atom.rate * d2;
    }
    return d;
}

// ---- binary-powerlaw: series near 0 plus quadrature on the rest ----
//
// Untruncated, with delta = 1/4 and density s^-a:
//   int_0^delta (1 - s^{p+1} - (1-s)^{p+1}) s^-a ds
//     = sum_{k>=1} S_k delta^{k+1-a}/(k+1-a)  -  delta^{p+2-a}/(p+2-a),
// where S_k = (-1)^{k+1} binom(p+1, k) comes from the binomial series of
// 1 - (1-s)^{p+1}. The recurrence S_{k+1} = S_k (k-1-p)/(k+1) also yields
// the p-derivatives term by term, so no digamma functions are needed.

struct SeriesSums {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

SeriesSums powerlaw_left_series(double p, double a, double delta) {
    SeriesSums out;
    double S = p + 1.0, dS = 1.0, ddS = 0.0;
    double delta_pow = std::pow(delta, 2.0 - a);  // delta^{k+1-a} at k = 1
    for (int k = 1; k <= 200; ++k) {
        const double denom = k + 1.0 - a;
        const double D = delta_pow / denom;
        out.v += S * D;
        out.d1 += dS * D;
        out.d2 += ddS * D;
        if (k > 4 && std::fabs(S * D) < 1e-18 && std::fabs(dS * D) < 1e-18 &&
            std::fabs(ddS * D) < 1e-18)
            break;
        const double r = (k - 1.0 - p) / (k + 1.0);
        const double inv = 1.0 / (k + 1.0);
        ddS = ddS * r - 2.0 * dS * inv;
        dS = dS * r - S * inv;
        S = S * r;
        delta_pow *= delta;
    }
    // subtract the s^{p+1-a} part, differentiated in p
    const double beta = p + 2.0 - a;
    const double dp = std::pow(delta, beta);
    const double Ld = std::log(delta);
    out.v -= dp / beta;
    out.d1 -= dp * (Ld / beta - 1.0 / (beta * beta));
    out.d2 -= dp * (Ld * Ld / beta - 2.0 * Ld / (beta * beta) + 2.0 / (beta * beta * beta));
    return out;
}

double powerlaw_integrand(double s, double p, double a) {
    return (1.0 - std::pow(s, p + 1.0) - std::pow(1.0 - s, p + 1.0)) * std::pow(s, -a);
}
double powerlaw_integrand_d1(double s, double p, double a) {
    const double ls = std::log(s), l1 = std::log(1.0 - s);
    return (std::pow(s, p + 1.0) * (-ls) + std::pow(1.0 - s, p + 1.0) * (-l1)) * std::pow(s, -a);
}
double powerlaw_integrand_d2(double s, double p, double a) {
    const double ls = std::log(s), l1 = std::log(1.0 - s);
    return -(std::pow(s, p + 1.0) * ls * ls + std::pow(1.0 - s, p + 1.0) * l1 * l1) *
           std::pow(s, -a);
}

template <typename F>
double powerlaw_quad(const F& f, double lo, double hi) {
    // split at 1/2 so the adaptive effort near each endpoint stays local
    if (lo < 0.5 && hi > 0.5)
        return integrate(f, lo, 0.5, kQuadTol).value + integrate(f, 0.5, hi, kQuadTol).value;
    return integrate(f, lo, hi, kQuadTol).value;
}

double phi_powerlaw(double p, double a, double eps) {
    if (eps > 0.0) {
        return powerlaw_quad([p, a](double s) { return powerlaw_integrand(s, p, a); }, eps,
                             1.0 - eps);
    }
    const double delta = 0.25;
    return powerlaw_left_series(p, a, delta).v +
           powerlaw_quad([p, a](double s) { return powerlaw_integrand(s, p, a); }, delta, 1.0);
}

PhiDerivatives phi_derivs_powerlaw(double p, double a, double eps) {
    PhiDerivatives d;
    if (eps > 0.0) {
        d.d1 = powerlaw_quad([p, a](double s) { return powerlaw_integrand_d1(s, p, a); }, eps,
                             1.0 - eps);
        d.d2 = powerlaw_quad([p, a](double s) { return powerlaw_integrand_d2(s, p, a); }, eps,
                             1.0 - eps);
        return d;
    }
    const double delta = 0.25;
    const SeriesSums left = powerlaw_left_series(p, a, delta);
    d.d1 = left.d1 +
           powerlaw_quad([p, a](double s) { return powerlaw_integrand_d1(s, p, a); }, delta, 1.0);
    d.d2 = left.d2 +
           powerlaw_quad([p, a](double s) { return powerlaw_integrand_d2(s, p, a); }, delta, 1.0);
    return d;
}

} // namespace

double phi(const DislocationModel& model, double p, double epsilon) {
    check_domain(model, p);
    switch (model.kind) {
        case ModelKind::BinaryUniform: return phi_binary_uniform(p, epsilon);
        case ModelKind::TernaryDeterministic: return phi_ternary(p);
        case ModelKind::BinaryPowerlaw: return phi_powerlaw(p, model.powerlaw_a, epsilon);
        case ModelKind::CustomFinite: return phi_custom(model, p, epsilon);
    }
    return 0.0;
}

PhiDerivatives phi_derivatives(const DislocationModel& model, double p, double epsilon) {
    check_domain(model, p);
    switch (model.kind) {
        case ModelKind::BinaryUniform: return phi_derivs_binary_uniform(p, epsilon);
        case ModelKind::TernaryDeterministic: return phi_derivs_ternary(p);
        case ModelKind::BinaryPowerlaw: return phi_derivs_powerlaw(p, model.powerlaw_a, epsilon);
        case ModelKind::CustomFinite: return phi_derivs_custom(model, p, epsilon);
    }
    return {};
}

double phi_quadrature(const DislocationModel& model, double p, double epsilon) {
    check_domain(model, p);
    switch (model.kind) {
        case ModelKind::BinaryUniform: {
            const double lo = epsilon, hi = 1.0 - epsilon;
            return powerlaw_quad(
                [p](double s) {
                    return 1.0 - std::pow(s, p + 1.0) - std::pow(1.0 - s, p + 1.0);
                },
                lo, hi);
        }
        case ModelKind::BinaryPowerlaw:
            return phi_powerlaw(p, model.powerlaw_a, epsilon);
        case ModelKind::TernaryDeterministic:
        case ModelKind::CustomFinite:
            // atomic measures: the integral route is the atom sum itself
            return phi(model, p, epsilon);
    }
    return 0.0;
}

ExponentProfile solve_pbar(const DislocationModel& model, double epsilon) {
    auto g = [&](double p) {
        return phi(model, p, epsilon) - (1.0 + p) * phi_derivatives(model, p, epsilon).d1;
    };
    const double pbar = find_root_expanding(g, 1e-6, 1.0, 64.0, "solve_pbar");

    ExponentProfile prof;
    prof.pbar = pbar;
    const PhiDerivatives at_pbar = phi_derivatives(model, pbar, epsilon);
    prof.c = at_pbar.d1;
    prof.l = 1.5 / (1.0 + pbar);
    prof.phi2_at_pbar = at_pbar.d2;
    const PhiDerivatives at_zero = phi_derivatives(model, 0.0, epsilon);
    prof.phi0prime = at_zero.d1;
    prof.phi2_at_zero = at_zero.d2;
    prof.pbar_residual = phi(model, pbar, epsilon) / (1.0 + pbar) - prof.c;
    if (!(prof.pbar > 0.0)) throw InvariantError("solve_pbar: root is not positive");
    if (std::fabs(prof.pbar_residual) > 1e-10)
        throw InvariantError("solve_pbar: residual exceeds 1e-10");
    return prof;
}

double psi(const DislocationModel& model, double q, double epsilon) {
    const double phi0p = phi_derivatives(model, 0.0, epsilon).d1;
    return q - phi(model, q - 1.0, epsilon) / phi0p;
}

double psi_prime(const DislocationModel& model, double q, double epsilon) {
    const double phi0p = phi_derivatives(model, 0.0, epsilon).d1;
    return 1.0 - phi_derivatives(model, q - 1.0, epsilon).d1 / phi0p;
}

PsiAlignment psi_and_alignment(const DislocationModel& model, const ExponentProfile& profile,
                               double epsilon) {
    // Psi'(q) = Psi(q)/q  <=>  Phi(q-1) = q Phi'(q-1); solved independently
    // of solve_pbar and compared against pbar + 1.
    auto h = [&](double q) { return psi(model, q, epsilon) / q - psi_prime(model, q, epsilon); };
    const double qbar = find_root_expanding(h, 1.0 + 1e-9, 2.0, 66.0, "psi_and_alignment");
    return PsiAlignment{qbar, std::fabs(qbar - (profile.pbar + 1.0))};
}

SpectrumPoint spectrum(const DislocationModel& model, const ExponentProfile& profile, double beta,
                       double epsilon) {
    if (!(beta > 0.0)) throw PreconditionError("out-of-range-beta: beta must be positive");
    // Phi' decreases from its (possibly infinite) value at the domain edge
    // to 0, so bracket q by expanding in both directions.
    auto slope_minus_beta = [&](double q) {
        return phi_derivatives(model, q, epsilon).d1 - beta;
    };
    const double floor = model.p_lower();
    double lo = 0.0;
    if (slope_minus_beta(lo) < 0.0) {
        // need q below zero; walk toward the domain edge
        double step = 0.5;
        bool found = false;
        while (!found) {
            double cand = lo - step;
            if (std::isfinite(floor)) {
                cand = std::max(cand, floor + (lo - floor) * 0.25);
                if (cand <= floor + 1e-3 || cand >= lo) break;
            } else if (cand < -1e3) {
                break;
            }
            if (slope_minus_beta(cand) > 0.0) {
                lo = cand;
                found = true;
            } else {
                lo = cand;
                step *= 2.0;
            }
        }
        if (!found) throw PreconditionError("out-of-range-beta: beta above the attainable slope range");
        // lo now has positive sign; upper end is the previous point (slope < beta)
    }
    double hi = std::max(lo + 1.0, 1.0);
    double fhi = slope_minus_beta(hi);
    while (fhi > 0.0 && hi < 512.0) {
        hi *= 2.0;
        fhi = slope_minus_beta(hi);
    }
    if (fhi > 0.0) throw PreconditionError("out-of-range-beta: beta below the attainable slope range");
    const double flo = slope_minus_beta(lo);
    if (flo < 0.0) throw PreconditionError("out-of-range-beta: no solution to Phi'(q) = beta");
    const double q_beta = brent_root(slope_minus_beta, lo, hi, flo, fhi);

    SpectrumPoint pt;
    pt.beta = beta;
    pt.q_beta = q_beta;
    const double phi_q = phi(model, q_beta, epsilon);
    pt.dim_euclid = 1.0 + q_beta - phi_q / beta;
    pt.dim_intrinsic = (beta / profile.phi0prime) * (1.0 + q_beta) - phi_q / profile.phi0prime;
    if (pt.dim_euclid < -1e-9)
        throw PreconditionError("out-of-range-beta: spectrum negative at this decay rate");
    return pt;
}

FAlphaPoint f_of_alpha(const DislocationModel& model, double alpha, double epsilon) {
    // Psi'(p) = alpha; Psi' = 1 - Phi'(p-1)/Phi'(0) increases in p.
    auto g = [&](double p) { return psi_prime(model, p, epsilon) - alpha; };
    double lo = 1.0 + 1e-9, hi = 2.0;
    double flo = g(lo);
    if (flo > 0.0) {
        // alpha below Psi'(1) = 0: walk down toward the domain edge
        const double floor = model.p_lower() + 1.0;
        while (flo > 0.0) {
            const double cand = std::isfinite(floor) ? floor + (lo - floor) * 0.25 : lo - 1.0;
            if (!(cand < lo) || (std::isfinite(floor) && cand <= floor + 1e-9) || cand < -1e3)
                throw PreconditionError("f_of_alpha: alpha below the attainable range");
            lo = cand;
            flo = g(lo);
        }
        hi = 1.0;
    }
    double fhi = g(hi);
    while (fhi < 0.0 && hi < 512.0) {
        hi *= 2.0;
        fhi = g(hi);
    }
    if (fhi < 0.0) throw PreconditionError("f_of_alpha: alpha above the attainable range");
    const double p_alpha = brent_root(g, lo, hi, flo, fhi);
    FAlphaPoint pt;
    pt.alpha = alpha;
    pt.p_alpha = p_alpha;
    pt.f_alpha = psi(model, p_alpha, epsilon) - alpha * p_alpha;
    return pt;
}

} // namespace fragscope
