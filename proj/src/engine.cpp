#include "fragscope/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "fragscope/errors.hpp"

namespace fragscope {

namespace {

constexpr double kMassTol = 1e-9;

struct EventContext {
    const DislocationModel* model;
    const TruncationPolicy* policy;
    double cutoff;
    std::size_t ceiling;
    std::vector<double> scratch;  // reused partition buffer
};

// Replace active[victim] by its surviving blocks; sub-cutoff blocks move
// their mass to pruned_mass. Indices of newly filled slots are reported via
// on_child (used by the per-fragment scheduler to draw birth clocks).
// Returns the number of surviving blocks; zero means the victim slot was
// swap-filled from the back of the vector.
template <typename OnChild>
std::size_t apply_dislocation(SimulationState& state, EventContext& ctx, std::size_t victim,
                              Rng& rng, const OnChild& on_child) {
    sample_partition_into(*ctx.model, *ctx.policy, rng, ctx.scratch);
    const Fragment parent = state.active[victim];

    const double pre_event_zeta = parent.neglog - state.drift_c * state.clock;
    const double child_min_zeta = std::min(parent.min_zeta, pre_event_zeta);

    state.mass_active -= parent.size;
    // The last above-cutoff fragment always keeps its largest block, so the
    // active set never empties: a dislocation touches one fragment, hence
    // zero is only reachable from a population of one.
    const bool keep_largest = state.active.size() == 1;
    std::size_t survivors = 0;
    std::size_t child_index = 0;
    for (double frac : ctx.scratch) {
        const bool forced = keep_largest && child_index++ == 0;  // blocks are descending
        const double child_size = parent.size * frac;
        if (child_size < ctx.cutoff && !forced) {
            state.pruned_mass += child_size;
            continue;
        }
        Fragment child;
        child.size = child_size;
        child.neglog = parent.neglog - std::log(frac);
        child.birth_time = state.clock;
        child.min_zeta = child_min_zeta;
        state.mass_active += child_size;
        if (survivors == 0) {
            state.active[victim] = child;
            on_child(victim);
        } else {
            if (state.active.size() >= ctx.ceiling)
                throw PreconditionError(
                    "population-overflow: active fragments exceed the ceiling; "
                    "raise the ceiling or reduce prune_margin");
            state.active.push_back(child);
            on_child(state.active.size() - 1);
        }
        ++survivors;
    }
    if (survivors == 0) {
        // every block fell below the cutoff
        state.active[victim] = state.active.back();
        state.active.pop_back();
    }
    ++state.events;
    state.peak_active = std::max(state.peak_active, state.active.size());
    return survivors;
}

void checkpoint(SimulationState& state) {
    state.check_mass_conservation();
    state.mass_active = state.exact_active_mass();  // resync incremental total
}

} // namespace

SimulationState SimulationState::initial(double prune_cutoff, double drift_c) {
    SimulationState s;
    s.prune_cutoff = prune_cutoff;
    s.drift_c = drift_c;
    s.active.push_back(Fragment{1.0, 0.0, 0.0, 0.0});
    return s;
}

double SimulationState::exact_active_mass() const {
    double sum = 0.0, comp = 0.0;
    for (const Fragment& f : active) {
        const double y = f.size - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void SimulationState::check_mass_conservation() const {
    const double total = exact_active_mass() + pruned_mass;
    if (std::fabs(total - 1.0) > kMassTol)
        throw InvariantError("mass-conservation-violation: active + pruned = " +
                             std::to_string(total));
}

double additive_martingale(const SimulationState& state, const ExponentProfile& profile) {
    const double phi_pbar = (1.0 + profile.pbar) * profile.c;
    const double expo_t = phi_pbar * state.clock;
    double sum = 0.0;
    for (const Fragment& f : state.active)
        sum += std::exp(expo_t - (1.0 + profile.pbar) * f.neglog);
    return sum;
}

double martingale_pruning_bound(const SimulationState& state, const ExponentProfile& profile,
                                std::size_t population_ceiling) {
    if (state.prune_cutoff <= 0.0) return 0.0;
    const double phi_pbar = (1.0 + profile.pbar) * profile.c;
    return static_cast<double>(population_ceiling) * std::exp(phi_pbar * state.clock) *
           std::pow(state.prune_cutoff, 1.0 + profile.pbar);
}

std::int64_t count_near_maximal(const SimulationState& state, double c_prime) {
    if (!(c_prime > state.drift_c))
        throw PreconditionError("count_near_maximal: c_prime must exceed c");
    const double threshold = c_prime * state.clock + 1.0;
    if (state.prune_cutoff > 0.0 && std::exp(-threshold) < state.prune_cutoff)
        throw PreconditionError(
            "cutoff-too-coarse: pruning could have removed qualifying fragments");
    std::int64_t count = 0;
    for (const Fragment& f : state.active)
        if (f.neglog <= threshold) ++count;
    return count;
}

namespace {

void snapshot(const SimulationState& state, const ExponentProfile& profile,
              const EngineOptions& options, double t, TrackerSeries& out) {
    double min_neglog = std::numeric_limits<double>::infinity();
    const double pbar1 = 1.0 + profile.pbar;
    const double expo_t = pbar1 * profile.c * t;
    const double c_prime = profile.c + options.near_max_delta;
    const double near_thresh = c_prime * t + 1.0;
    const bool near_ok =
        state.prune_cutoff <= 0.0 || std::exp(-near_thresh) >= state.prune_cutoff;

    double mart = 0.0;
    std::int64_t near = 0;
    for (const Fragment& f : state.active) {
        min_neglog = std::min(min_neglog, f.neglog);
        mart += std::exp(expo_t - pbar1 * f.neglog);
        if (f.neglog <= near_thresh) ++near;
    }
    out.grid.push_back(t);
    out.max_size.push_back(state.active.empty() ? 0.0 : std::exp(-min_neglog));
    out.martingale.push_back(mart);
    out.martingale_pruning_bound.push_back(
        state.prune_cutoff <= 0.0
            ? 0.0
            : static_cast<double>(options.population_ceiling) * std::exp(expo_t) *
                  std::pow(state.prune_cutoff, pbar1));
    out.pruned_mass.push_back(state.pruned_mass);
    out.near_max_count.push_back(near_ok ? near : -1);
    out.active_count.push_back(state.active.size());
}

TrackerSeries run_global_clock(const DislocationModel& model, const TruncationPolicy& policy,
                               const EngineOptions& options, const ExponentProfile& profile,
                               Rng& rng) {
    const double cutoff =
        (options.disable_pruning || options.horizon == 0.0)
            ? 0.0
            : std::exp(-(profile.c + options.prune_margin) * options.horizon);
    SimulationState state = SimulationState::initial(cutoff, profile.c);
    EventContext ctx{&model, &policy, cutoff, options.population_ceiling, {}};

    TrackerSeries out;
    std::size_t gi = 0;
    std::uint64_t next_check = options.check_interval;

    while (!state.active.empty()) {
        const double rate = static_cast<double>(state.active.size()) * policy.effective_rate;
        const double t_next = state.clock + rng.exponential(rate);
        while (gi < options.grid.size() && options.grid[gi] < t_next &&
               options.grid[gi] <= options.horizon)
            snapshot(state, profile, options, options.grid[gi++], out);
        if (t_next > options.horizon) break;
        state.clock = t_next;
        const std::size_t victim = rng.uniform_below(state.active.size());
        apply_dislocation(state, ctx, victim, rng, [](std::size_t) {});
        if (state.events >= next_check) {
            checkpoint(state);
            next_check += options.check_interval;
        }
    }
    while (gi < options.grid.size() && options.grid[gi] <= options.horizon) {
        state.clock = options.grid[gi];
        snapshot(state, profile, options, options.grid[gi], out);
        ++gi;
    }
    checkpoint(state);
    out.total_events = state.events;
    out.peak_active = state.peak_active;
    return out;
}

// Reference scheduler: every fragment carries its own exponential clock in a
// priority queue. Same law as the global clock by homogeneity; kept as the
// correctness cross-check for the event engine.
TrackerSeries run_per_fragment_clock(const DislocationModel& model, const TruncationPolicy& policy,
                                     const EngineOptions& options, const ExponentProfile& profile,
                                     Rng& rng) {
    const double cutoff =
        (options.disable_pruning || options.horizon == 0.0)
            ? 0.0
            : std::exp(-(profile.c + options.prune_margin) * options.horizon);
    SimulationState state = SimulationState::initial(cutoff, profile.c);
    EventContext ctx{&model, &policy, cutoff, options.population_ceiling, {}};

    // (event_time, slot, stamp); stale entries are recognized by the stamp
    struct Entry {
        double time;
        std::size_t slot;
        std::uint64_t stamp;
        bool operator>(const Entry& o) const { return time > o.time; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    std::vector<std::uint64_t> stamp(1, 0);
    std::uint64_t stamp_counter = 0;

    queue.push(Entry{rng.exponential(policy.effective_rate), 0, 0});

    TrackerSeries out;
    std::size_t gi = 0;
    std::uint64_t next_check = options.check_interval;

    while (!queue.empty()) {
        Entry e = queue.top();
        queue.pop();
        if (e.slot >= state.active.size() || stamp[e.slot] != e.stamp) continue;  // stale
        while (gi < options.grid.size() && options.grid[gi] < e.time &&
               options.grid[gi] <= options.horizon)
            snapshot(state, profile, options, options.grid[gi++], out);
        if (e.time > options.horizon) break;
        state.clock = e.time;
        const std::size_t survivors =
            apply_dislocation(state, ctx, e.slot, rng, [&](std::size_t slot) {
                if (slot >= stamp.size()) stamp.resize(slot + 1, 0);
                stamp[slot] = ++stamp_counter;
                queue.push(Entry{state.clock + rng.exponential(policy.effective_rate), slot,
                                 stamp[slot]});
            });
        if (survivors == 0 && e.slot < state.active.size()) {
            // swap-remove moved the tail fragment into this slot; rekey its
            // clock (legitimate by memorylessness of the exponential)
            stamp[e.slot] = ++stamp_counter;
            queue.push(Entry{state.clock + rng.exponential(policy.effective_rate), e.slot,
                             stamp[e.slot]});
        }
        if (stamp.size() > state.active.size()) stamp.resize(state.active.size());
        if (state.events >= next_check) {
            checkpoint(state);
            next_check += options.check_interval;
        }
    }
    while (gi < options.grid.size() && options.grid[gi] <= options.horizon) {
        state.clock = options.grid[gi];
        snapshot(state, profile, options, options.grid[gi], out);
        ++gi;
    }
    checkpoint(state);
    out.total_events = state.events;
    out.peak_active = state.peak_active;
    return out;
}

} // namespace

TrackerSeries run(const DislocationModel& model, const TruncationPolicy& policy,
                  const EngineOptions& options, const ExponentProfile& profile, Rng& rng) {
    if (!(options.horizon >= 0.0)) throw PreconditionError("run: horizon must be nonnegative");
    for (std::size_t i = 0; i < options.grid.size(); ++i) {
        if (options.grid[i] < 0.0 || options.grid[i] > options.horizon)
            throw PreconditionError("run: grid times must lie within [0, horizon]");
        if (i > 0 && options.grid[i] <= options.grid[i - 1])
            throw PreconditionError("run: grid times must be strictly ascending");
    }
    if (!options.disable_pruning && options.horizon > 0.0 &&
        !(std::exp(-(profile.c + options.prune_margin) * options.horizon) < 1.0))
        throw PreconditionError("run: prune cutoff must be below 1");
    return options.scheduler == Scheduler::GlobalClock
               ? run_global_clock(model, policy, options, profile, rng)
               : run_per_fragment_clock(model, policy, options, profile, rng);
}

SimulationState run_to(const DislocationModel& model, const TruncationPolicy& policy, double t,
                       const ExponentProfile& profile, double prune_cutoff, Rng& rng,
                       std::size_t population_ceiling) {
    SimulationState state = SimulationState::initial(prune_cutoff, profile.c);
    EventContext ctx{&model, &policy, prune_cutoff, population_ceiling, {}};
    std::uint64_t next_check = 65536;
    while (!state.active.empty()) {
        const double rate = static_cast<double>(state.active.size()) * policy.effective_rate;
        const double t_next = state.clock + rng.exponential(rate);
        if (t_next > t) break;
        state.clock = t_next;
        const std::size_t victim = rng.uniform_below(state.active.size());
        apply_dislocation(state, ctx, victim, rng, [](std::size_t) {});
        if (state.events >= next_check) {
            checkpoint(state);
            next_check += 65536;
        }
    }
    state.clock = t;
    checkpoint(state);
    return state;
}

} // namespace fragscope
