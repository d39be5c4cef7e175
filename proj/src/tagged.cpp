#include "fragscope/tagged.hpp"

#include <algorithm>
#include <cmath>

#include "fragscope/errors.hpp"

namespace fragscope {

namespace {

void check_horizon(const TaggedPath& path, double t) {
    if (t < 0.0 || t > path.horizon) throw PreconditionError("out-of-horizon query on tagged path");
}

// Size-biased block pick: probability u_i for a conservative partition.
std::size_t pick_size_biased(const std::vector<double>& sizes, Rng& rng) {
    double u = rng.uniform01();
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        u -= sizes[i];
        if (u < 0.0) return i;
    }
    return sizes.size() - 1;
}

} // namespace

TaggedPath simulate_tagged(const DislocationModel& model, const TruncationPolicy& policy,
                           double horizon, Measure measure, const ExponentProfile& profile,
                           Rng& rng) {
    if (!(horizon >= 0.0)) throw PreconditionError("simulate_tagged: horizon must be nonnegative");
    if (!(policy.effective_rate > 0.0))
        throw PreconditionError("degenerate-truncation: truncated measure has zero mass");

    TaggedPath path;
    path.measure = measure;
    path.horizon = horizon;
    path.drift_c = profile.c;

    std::vector<double> partition;
    double clock = 0.0;
    double xi = 0.0;
    for (;;) {
        clock += rng.exponential(policy.effective_rate);
        if (clock > horizon) break;
        sample_partition_into(model, policy, rng, partition);
        const std::size_t block = pick_size_biased(partition, rng);
        if (measure == Measure::Q) {
            // thinning: accept the proposed jump j with probability e^{-pbar j}
            if (rng.uniform01() >= std::pow(partition[block], profile.pbar)) continue;
        }
        xi += -std::log(partition[block]);
        path.jump_times.push_back(clock);
        path.cum_xi.push_back(xi);
    }
    return path;
}

double xi_at(const TaggedPath& path, double t) {
    check_horizon(path, t);
    const auto it = std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - path.jump_times.begin());
    return k == 0 ? 0.0 : path.cum_xi[k - 1];
}

double zeta(const TaggedPath& path, double t) { return xi_at(path, t) - path.drift_c * t; }

double running_min(const TaggedPath& path, double t) {
    check_horizon(path, t);
    double best = xi_at(path, t) - path.drift_c * t;  // endpoint of the final linear piece
    for (std::size_t k = 0; k < path.jump_times.size() && path.jump_times[k] <= t; ++k) {
        const double pre_jump_xi = k == 0 ? 0.0 : path.cum_xi[k - 1];
        best = std::min(best, pre_jump_xi - path.drift_c * path.jump_times[k]);
    }
    return best;
}

double change_of_measure_weight(const TaggedPath& path, const ExponentProfile& profile, double t) {
    const double phi_pbar = (1.0 + profile.pbar) * profile.c;
    return std::exp(phi_pbar * t - profile.pbar * xi_at(path, t));
}

PairSplitSample simulate_pair(const DislocationModel& model, const TruncationPolicy& policy,
                              double horizon, Rng& rng) {
    if (!(horizon > 0.0)) throw PreconditionError("simulate_pair: horizon must be positive");
    if (!(policy.effective_rate > 0.0))
        throw PreconditionError("degenerate-truncation: truncated measure has zero mass");

    std::vector<double> partition;
    double clock = 0.0;
    double common_neglog = 0.0;
    for (;;) {
        clock += rng.exponential(policy.effective_rate);
        if (clock > horizon) return PairSplitSample{horizon, true, common_neglog};
        sample_partition_into(model, policy, rng, partition);
        // stay together in block i with probability u_i^2
        double u = rng.uniform01();
        bool together = false;
        for (double s : partition) {
            u -= s * s;
            if (u < 0.0) {
                common_neglog += -std::log(s);
                together = true;
                break;
            }
        }
        if (!together) return PairSplitSample{clock, false, common_neglog};
    }
}

PairJointSample simulate_pair_joint(const DislocationModel& model, const TruncationPolicy& policy,
                                    double t, Rng& rng) {
    if (!(t > 0.0)) throw PreconditionError("simulate_pair_joint: time must be positive");
    if (!(policy.effective_rate > 0.0))
        throw PreconditionError("degenerate-truncation: truncated measure has zero mass");

    std::vector<double> partition;
    double clock = 0.0;
    double common_neglog = 0.0;
    for (;;) {
        clock += rng.exponential(policy.effective_rate);
        if (clock > t) return PairJointSample{common_neglog, common_neglog, t, true};
        sample_partition_into(model, policy, rng, partition);
        double u = rng.uniform01();
        bool together = false;
        for (double s : partition) {
            u -= s * s;
            if (u < 0.0) {
                common_neglog += -std::log(s);
                together = true;
                break;
            }
        }
        if (together) continue;

        // separation: conditioned on distinct blocks, (block of x, block of y)
        // has probability u_i u_j / (1 - sum u_k^2); rejection on the
        // independent size-biased pair realizes exactly that law
        std::size_t bx, by;
        do {
            bx = pick_size_biased(partition, rng);
            by = pick_size_biased(partition, rng);
        } while (bx == by);

        // after separation the tags evolve as independent tagged fragments;
        // block sizes are captured before the buffer is reused
        const double split_time = clock;
        const double bx_size = partition[bx];
        const double by_size = partition[by];
        auto continue_tag = [&](double start_xi) {
            double xi = start_xi;
            double s_clock = split_time;
            for (;;) {
                s_clock += rng.exponential(policy.effective_rate);
                if (s_clock > t) return xi;
                sample_partition_into(model, policy, rng, partition);
                xi += -std::log(partition[pick_size_biased(partition, rng)]);
            }
        };
        const double xi_x = continue_tag(common_neglog - std::log(bx_size));
        const double xi_y = continue_tag(common_neglog - std::log(by_size));
        return PairJointSample{xi_x, xi_y, split_time, false};
    }
}

} // namespace fragscope
