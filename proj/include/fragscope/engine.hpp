#pragma once

#include <cstdint>
#include <vector>

#include "fragscope/exponent.hpp"
#include "fragscope/model.hpp"
#include "fragscope/rng.hpp"

namespace fragscope {

struct Fragment {
    double size;        // in (0, 1]
    double neglog;      // -log(size), the primary coordinate at depth
    double birth_time;
    double min_zeta;    // running min of neglog - c*s over closed history
};

// Live pruned population. Mass below the cutoff accumulates in pruned_mass;
// mass_active is maintained incrementally and re-derived at checkpoints.
struct SimulationState {
    double clock = 0.0;
    std::vector<Fragment> active;
    double pruned_mass = 0.0;
    double mass_active = 1.0;
    double prune_cutoff = 0.0;  // 0 disables pruning
    double drift_c = 0.0;       // c used for the zeta bookkeeping
    std::uint64_t events = 0;
    std::size_t peak_active = 1;

    static SimulationState initial(double prune_cutoff, double drift_c);

    double exact_active_mass() const;
    void check_mass_conservation() const;  // throws InvariantError beyond 1e-9
};

enum class Scheduler { GlobalClock, PerFragmentClock };

struct EngineOptions {
    double horizon = 0.0;
    std::vector<double> grid;          // ascending, within [0, horizon]
    // Cutoff is exp(-(c + prune_margin) * horizon). The largest fragment
    // sits near exp(-(c t + l log t)), so margin * horizon must exceed
    // l log(horizon) with room to spare or the population can die out;
    // short horizons need proportionally larger margins.
    double prune_margin = 0.05;
    double near_max_delta = 0.1;       // tracks #{neglog - (c+delta) t <= 1}
    std::size_t population_ceiling = 10'000'000;
    bool disable_pruning = false;
    Scheduler scheduler = Scheduler::GlobalClock;
    std::uint64_t check_interval = 65536;  // events between exact mass checks
};

// Time-gridded observables of one run.
struct TrackerSeries {
    std::vector<double> grid;
    std::vector<double> max_size;
    std::vector<double> martingale;
    std::vector<double> martingale_pruning_bound;
    std::vector<double> pruned_mass;
    std::vector<std::int64_t> near_max_count;  // -1 where the cutoff guard failed
    std::vector<std::uint64_t> active_count;
    std::uint64_t total_events = 0;
    std::size_t peak_active = 1;
};

TrackerSeries run(const DislocationModel& model, const TruncationPolicy& policy,
                  const EngineOptions& options, const ExponentProfile& profile, Rng& rng);

// Evolve a fresh state to time t with a fixed cutoff (0 = exact) and return
// it; the grid machinery is bypassed. Used by the statistics layer.
SimulationState run_to(const DislocationModel& model, const TruncationPolicy& policy, double t,
                       const ExponentProfile& profile, double prune_cutoff, Rng& rng,
                       std::size_t population_ceiling = 10'000'000);

// M_t = sum over active fragments of exp(Phi(pbar) t) size^{1+pbar};
// Phi(pbar) = (1+pbar) c through the defining equation of pbar.
double additive_martingale(const SimulationState& state, const ExponentProfile& profile);

// Contribution the pruned mass could still add to M_t, reported alongside.
double martingale_pruning_bound(const SimulationState& state, const ExponentProfile& profile,
                                std::size_t population_ceiling);

// #{active fragments with neglog - c_prime * clock <= 1}. Throws
// cutoff-too-coarse when pruning could have removed qualifying fragments.
std::int64_t count_near_maximal(const SimulationState& state, double c_prime);

} // namespace fragscope
