#pragma once

#include <vector>

#include "fragscope/exponent.hpp"
#include "fragscope/model.hpp"
#include "fragscope/rng.hpp"

namespace fragscope {

enum class Measure { P, Q };

// Piecewise-constant subordinator path xi with its jump ledger.
// cum_xi[i] is the value of xi immediately after jump i.
struct TaggedPath {
    std::vector<double> jump_times;  // ascending
    std::vector<double> cum_xi;      // running sums of the jumps
    Measure measure = Measure::P;
    double horizon = 0.0;
    double drift_c = 0.0;  // c used by zeta = xi - c t
};

// Tagged-fragment subordinator. Under P the block is chosen size-biased;
// under Q each candidate jump j is thinned with acceptance e^{-pbar j}, so
// the accepted-event law carries the exponential tilt and the resulting
// Laplace exponent is q -> Phi_eps(q + pbar) - Phi_eps(pbar).
TaggedPath simulate_tagged(const DislocationModel& model, const TruncationPolicy& policy,
                           double horizon, Measure measure, const ExponentProfile& profile,
                           Rng& rng);

double xi_at(const TaggedPath& path, double t);

// zeta_t = xi_t - c t (right-continuous).
double zeta(const TaggedPath& path, double t);

// inf of zeta over [0, t], exact from the jump ledger: between jumps zeta
// falls linearly, so the infimum sits just before a jump or at t.
double running_min(const TaggedPath& path, double t);

// The martingale exp(Phi(pbar) t - pbar xi_t) used by the change of measure.
double change_of_measure_weight(const TaggedPath& path, const ExponentProfile& profile, double t);

struct PairSplitSample {
    double split_time = 0.0;              // censored at horizon if censored
    bool censored = false;
    double common_neglog_at_split = 0.0;  // -log of the common fragment just before separation
};

// Two independent uniform tags: at each dislocation of their common
// fragment with partition u they stay together in block i with probability
// u_i^2 and separate otherwise.
PairSplitSample simulate_pair(const DislocationModel& model, const TruncationPolicy& policy,
                              double horizon, Rng& rng);

struct PairJointSample {
    double xi_x = 0.0;  // -log fragment size of tag x at time t
    double xi_y = 0.0;
    double split_time = 0.0;
    bool censored = false;  // still together at t
};

// As simulate_pair, but both tags are continued past the separation as
// independent tagged fragments so joint functionals at a fixed time are
// available (two-point correlation experiments).
PairJointSample simulate_pair_joint(const DislocationModel& model, const TruncationPolicy& policy,
                                    double t, Rng& rng);

} // namespace fragscope
