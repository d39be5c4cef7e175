#pragma once

#include <cstdint>
#include <vector>

#include "fragscope/rng.hpp"
#include "fragscope/stats.hpp"

namespace fragscope {

// Zero-mean, finite-variance, spectrally positive Levy process of the form
// X_t = Y_t - c t with Y a pure-jump subordinator. Two reference jump laws:
// unit jumps (compensated Poisson) and exponential jumps.
struct LevyModel {
    enum class JumpKind { Unit, Exponential } jump_kind = JumpKind::Unit;
    double lambda = 1.0;    // jump arrival rate
    double theta = 1.0;     // exponential jump parameter (mean 1/theta)
    double drift = 1.0;     // c; equals lambda * E[jump] so the mean is zero
    double var_rate = 1.0;  // lambda * E[jump^2]

    static LevyModel compensated_poisson(double lambda);
    static LevyModel compensated_compound_exponential(double lambda, double theta);
};

// sqrt(t) * P(r <= X_t <= r + h) / h, simulated exactly in distribution at
// the single time t. The window floor keeps lattice jump laws meaningful.
MCEstimate small_ball(const LevyModel& levy, double t, double r, double h, std::size_t n,
                      std::uint64_t seed, unsigned workers, double window_floor = 1.0);

// sqrt(t) * P(min over [0,t] of X >= -u) / (u + 1); the running minimum is
// exact from the jump ledger (linear decay between jumps).
MCEstimate min_tail(const LevyModel& levy, double t, double u, std::size_t n, std::uint64_t seed,
                    unsigned workers);

// t^{3/2} * P(X_t <= g, min over [0,t] >= -f).
MCEstimate corridor(const LevyModel& levy, double t, double f, double g, std::size_t n,
                    std::uint64_t seed, unsigned workers);

// Shape of the corridor bound: {(f+1) ^ sqrt(t)} {(g+f+1)^2 ^ t} / t^{3/2},
// to be multiplied by a calibrated constant.
double corridor_bound_shape(double t, double f, double g);

// t^{3/2} * P(min over [0,t] of X + alpha >= 0,
//             min over [t,2t] of X + alpha >= f(t),
//             f(t) <= X_{2t} + alpha < f(t) + C), with f(t) = l_coef log t.
MCEstimate liminf_event(const LevyModel& levy, double t, double alpha, double l_coef, double C,
                        std::size_t n, std::uint64_t seed, unsigned workers);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> grid;
    std::vector<MCEstimate> per_point;
};

// Least squares of log(estimate) against log(t) over the grid.
ScalingFit fit_loglog(const std::vector<double>& grid, const std::vector<MCEstimate>& points);

struct SummabilityResult {
    double partial_sum = 0.0;      // sum over n = 4..N of n (1 - (log n)^-k)^{n^alpha}
    double tail_bound = 0.0;       // certified bound on the remainder past N
    double tail_bound_log10 = 0.0; // same bound in log10 (the bound may underflow)
};

// Exact partial sum in log-space arithmetic plus an integral-comparison
// tail certificate. Requires log N >= 2k/alpha for the certificate.
SummabilityResult summability_check(double alpha, int k, std::uint64_t N);

} // namespace fragscope
