#pragma once

#include "fragscope/model.hpp"

namespace fragscope {

// Derived constants of a dislocation model. pbar solves
// Phi(p)/(1+p) = Phi'(p); c is the decay rate of the largest fragment and
// l the log-correction coefficient.
struct ExponentProfile {
    double pbar = 0.0;
    double c = 0.0;             // Phi'(pbar)
    double l = 0.0;             // (3/2) / (1 + pbar)
    double phi0prime = 0.0;     // Phi'(0)
    double phi2_at_pbar = 0.0;  // Phi''(pbar), negative
    double phi2_at_zero = 0.0;  // Phi''(0), negative
    double pbar_residual = 0.0; // Phi(pbar)/(1+pbar) - Phi'(pbar)
};

struct SpectrumPoint {
    double beta = 0.0;
    double q_beta = 0.0;        // solves Phi'(q) = beta
    double dim_euclid = 0.0;    // 1 + q - Phi(q)/beta
    double dim_intrinsic = 0.0; // (beta/Phi'(0))(1+q) - Phi(q)/Phi'(0)
};

struct PhiDerivatives {
    double d1 = 0.0;
    double d2 = 0.0;
};

// Levy exponent Phi(p) = integral of (1 - sum of block^{p+1}) against the
// dislocation measure, truncated at epsilon (epsilon = 0: full measure).
// Closed forms where the model admits one, series + quadrature otherwise.
double phi(const DislocationModel& model, double p, double epsilon = 0.0);

// First and second derivatives, by differentiating the closed form or the
// integrand (never by finite differences of quadrature output).
PhiDerivatives phi_derivatives(const DislocationModel& model, double p, double epsilon = 0.0);

// Integral-route evaluation of Phi, independent of the closed forms.
// Primary path for binary-powerlaw; force-enabled by tests elsewhere.
double phi_quadrature(const DislocationModel& model, double p, double epsilon = 0.0);

ExponentProfile solve_pbar(const DislocationModel& model, double epsilon = 0.0);

// Psi(q) = q - Phi(q-1)/Phi'(0) and its derivative.
double psi(const DislocationModel& model, double q, double epsilon = 0.0);
double psi_prime(const DislocationModel& model, double q, double epsilon = 0.0);

struct PsiAlignment {
    double qbar = 0.0;      // solves Psi'(q) = Psi(q)/q
    double residual = 0.0;  // |qbar - (pbar + 1)|
};

PsiAlignment psi_and_alignment(const DislocationModel& model, const ExponentProfile& profile,
                               double epsilon = 0.0);

// Multifractal spectrum point at decay rate beta, in both the Euclidean
// and the intrinsic metric. Throws out-of-range-beta when the Euclidean
// dimension would be negative or no q solves Phi'(q) = beta.
SpectrumPoint spectrum(const DislocationModel& model, const ExponentProfile& profile, double beta,
                       double epsilon = 0.0);

struct FAlphaPoint {
    double alpha = 0.0;
    double p_alpha = 0.0;  // solves Psi'(p) = alpha
    double f_alpha = 0.0;  // Psi(p_alpha) - alpha * p_alpha
};

FAlphaPoint f_of_alpha(const DislocationModel& model, double alpha, double epsilon = 0.0);

} // namespace fragscope
