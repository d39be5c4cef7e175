#include "fragscope/analysis.hpp"

#include <cmath>
#include <string>

#include "fragscope/errors.hpp"
#include "fragscope/parallel.hpp"

namespace fragscope {

namespace {

// Stream tags separate the independent random streams of one experiment.
constexpr std::uint64_t kStreamLhs = 1;
constexpr std::uint64_t kStreamRhs = 2;

void require_finite(const DislocationModel& model, const char* op) {
    if (!model.finite_activity())
        throw PreconditionError(std::string("truncation-active: ") + op +
                                " requires a finite dislocation measure");
}

double f_on_state_fragment(const FSpec& f, const Fragment& frag, double t, double c) {
    const double zeta_t = frag.neglog - c * t;
    switch (f.kind) {
        case FSpec::Kind::Const: return 1.0;
        case FSpec::Kind::Terminal: return zeta_t <= f.param ? 1.0 : 0.0;
        case FSpec::Kind::RunningMin:
            return std::min(frag.min_zeta, zeta_t) >= -f.param ? 1.0 : 0.0;
    }
    return 0.0;
}

double f_on_tagged_path(const FSpec& f, const TaggedPath& path, double t) {
    switch (f.kind) {
        case FSpec::Kind::Const: return 1.0;
        case FSpec::Kind::Terminal: return zeta(path, t) <= f.param ? 1.0 : 0.0;
        case FSpec::Kind::RunningMin: return running_min(path, t) >= -f.param ? 1.0 : 0.0;
    }
    return 0.0;
}

} // namespace

Mt1Result mt1_check(const DislocationModel& model, const FSpec& functional, double t,
                    std::size_t n_lhs, std::size_t n_rhs, std::uint64_t seed, unsigned workers) {
    require_finite(model, "mt1_check");
    if (n_lhs < 2 || n_rhs < 2) throw PreconditionError("mt1_check: need at least 2 samples per side");

    const TruncationPolicy policy = TruncationPolicy::none(model);
    const ExponentProfile profile = solve_pbar(model);

    Mt1Result result;
    result.lhs_values.resize(n_lhs);
    result.rhs_values.resize(n_rhs);

    if (t == 0.0) {
        // no fragmentation yet: both sides are F evaluated on the zero path
        const double v = functional.kind == FSpec::Kind::Const
                             ? 1.0
                             : (functional.kind == FSpec::Kind::Terminal
                                    ? (0.0 <= functional.param ? 1.0 : 0.0)
                                    : (0.0 >= -functional.param ? 1.0 : 0.0));
        std::fill(result.lhs_values.begin(), result.lhs_values.end(), v);
        std::fill(result.rhs_values.begin(), result.rhs_values.end(), v);
        result.lhs = MCEstimate{v, 0.0, n_lhs};
        result.rhs = MCEstimate{v, 0.0, n_rhs};
        result.zscore = 0.0;
        return result;
    }

    const std::uint64_t lhs_master = derive_seed(seed, kStreamLhs);
    parallel_map(n_lhs, workers, [&](std::size_t i) {
        Rng rng(derive_seed(lhs_master, i));
        const SimulationState state = run_to(model, policy, t, profile, 0.0, rng);
        double sum = 0.0;
        for (const Fragment& frag : state.active)
            sum += f_on_state_fragment(functional, frag, t, profile.c);
        result.lhs_values[i] = sum;
    });

    const double pbar1 = 1.0 + profile.pbar;
    const std::uint64_t rhs_master = derive_seed(seed, kStreamRhs);
    parallel_map(n_rhs, workers, [&](std::size_t j) {
        Rng rng(derive_seed(rhs_master, j));
        const TaggedPath path = simulate_tagged(model, policy, t, Measure::Q, profile, rng);
        const double weight = std::exp(pbar1 * zeta(path, t));
        result.rhs_values[j] = weight * f_on_tagged_path(functional, path, t);
    });

    result.lhs = estimate_from(result.lhs_values);
    result.rhs = estimate_from(result.rhs_values);
    result.zscore = zscore(result.lhs, result.rhs);
    return result;
}

TheoremResult theorem_experiment(const DislocationModel& model, const TruncationPolicy& policy,
                                 const ExponentProfile& profile, const std::vector<double>& t_grid,
                                 std::size_t replicas, double prune_margin, std::uint64_t seed,
                                 unsigned workers) {
    if (t_grid.size() < 4)
        throw PreconditionError("theorem_experiment: grid has >= 4 distinct times");
    if (replicas < 2) throw PreconditionError("theorem_experiment: need >= 2 replicas");

    EngineOptions options;
    options.horizon = t_grid.back();
    options.grid = t_grid;
    options.prune_margin = prune_margin;

    TheoremResult out;
    out.neglog_max.assign(replicas, {});

    parallel_map(replicas, workers, [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        const TrackerSeries series = run(model, policy, options, profile, rng);
        std::vector<double>& row = out.neglog_max[r];
        row.resize(t_grid.size());
        for (std::size_t k = 0; k < t_grid.size(); ++k) {
            if (!(series.max_size[k] > 0.0))
                throw PreconditionError(
                    "theorem_experiment: population emptied before the horizon; "
                    "increase prune_margin");
            row[k] = -std::log(series.max_size[k]);
        }
    });

    std::vector<double> log_t(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) log_t[k] = std::log(t_grid[k]);

    Accumulator acc_t, acc_logt, acc_int;
    std::vector<Accumulator> acc_ratio(t_grid.size());
    for (std::size_t r = 0; r < replicas; ++r) {
        const Ols3 fit = ols3_fit(t_grid, log_t, out.neglog_max[r]);
        acc_t.push(fit.b1);
        acc_logt.push(fit.b2);
        acc_int.push(fit.intercept);
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            acc_ratio[k].push((out.neglog_max[r][k] - profile.c * t_grid[k]) / log_t[k]);
    }

    // pooled OLS equals the per-replica average on a shared design; the
    // replica spread gives an honest standard error
    out.regression.grid = t_grid;
    out.regression.coef_t = acc_t.mean;
    out.regression.coef_logt = acc_logt.mean;
    out.regression.intercept = acc_int.mean;
    out.regression.stderr_t = acc_t.estimate().stderr_of_mean;
    out.regression.stderr_logt = acc_logt.estimate().stderr_of_mean;

    out.mean_ratio.resize(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) out.mean_ratio[k] = acc_ratio[k].mean;
    return out;
}

GrowthResult growth_rate(const DislocationModel& model, const TruncationPolicy& policy,
                         const ExponentProfile& profile, double delta,
                         const std::vector<double>& t_grid, std::size_t replicas,
                         double prune_margin, std::uint64_t seed, unsigned workers) {
    if (!(delta > 0.0)) throw PreconditionError("growth_rate: delta must be positive");
    if (t_grid.size() < 2) throw PreconditionError("growth_rate: need >= 2 grid times");
    if (replicas < 2) throw PreconditionError("growth_rate: need >= 2 replicas");

    EngineOptions options;
    options.horizon = t_grid.back();
    options.grid = t_grid;
    options.prune_margin = prune_margin;
    options.near_max_delta = delta;

    GrowthResult out;
    out.counts.assign(replicas, {});
    parallel_map(replicas, workers, [&](std::size_t r) {
        Rng rng(derive_seed(seed, r));
        const TrackerSeries series = run(model, policy, options, profile, rng);
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            if (series.near_max_count[k] < 0)
                throw PreconditionError(
                    "cutoff-too-coarse: pruning could have removed near-maximal fragments; "
                    "increase prune_margin");
        out.counts[r] = series.near_max_count;
    });

    const std::size_t m = t_grid.size();
    out.mean_count.assign(m, 0.0);
    for (std::size_t r = 0; r < replicas; ++r)
        for (std::size_t k = 0; k < m; ++k)
            out.mean_count[k] += static_cast<double>(out.counts[r][k]);
    for (double& v : out.mean_count) v /= static_cast<double>(replicas);

    auto slope_of_means = [&](std::size_t skip) {
        std::vector<double> log_mean(m);
        const double denom = static_cast<double>(skip < replicas ? replicas - 1 : replicas);
        for (std::size_t k = 0; k < m; ++k) {
            double sum = 0.0;
            for (std::size_t r = 0; r < replicas; ++r) {
                if (r == skip) continue;
                sum += static_cast<double>(out.counts[r][k]);
            }
            const double mean = sum / denom;
            if (!(mean > 0.0))
                throw PreconditionError("growth_rate: empty near-maximal set at some grid time");
            log_mean[k] = std::log(mean);
        }
        return line_fit(t_grid, log_mean);
    };

    const LineFit full = slope_of_means(replicas);  // skip index out of range: use all
    std::vector<double> jack_slopes(replicas);
    double jack_mean = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
        jack_slopes[r] = slope_of_means(r).slope;
        jack_mean += jack_slopes[r];
    }
    jack_mean /= static_cast<double>(replicas);
    const double rr = static_cast<double>(replicas);
    double ss = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
        const double d = jack_slopes[r] - jack_mean;
        ss += d * d;
    }
    out.regression.grid = t_grid;
    out.regression.coef_t = full.slope;
    out.regression.intercept = full.intercept;
    out.regression.coef_logt = 0.0;
    out.regression.stderr_logt = 0.0;
    out.regression.stderr_t = std::sqrt((rr - 1.0) / rr * ss);
    return out;
}

CorrResult correlation_experiment(const DislocationModel& model, const TruncationPolicy& policy,
                                  const ExponentProfile& profile, double t, std::size_t n_pairs,
                                  std::size_t n_direct, std::uint64_t seed, unsigned workers) {
    require_finite(model, "correlation_experiment");
    if (!(t > 0.0)) throw PreconditionError("correlation_experiment: t must be positive");
    if (n_pairs < 2 || n_direct < 2)
        throw PreconditionError("correlation_experiment: need >= 2 samples per estimator");

    CorrResult out;
    out.split_times.resize(n_pairs);
    std::vector<char> censored(n_pairs, 0);

    const std::uint64_t pair_master = derive_seed(seed, kStreamLhs);
    parallel_map(n_pairs, workers, [&](std::size_t i) {
        Rng rng(derive_seed(pair_master, i));
        const PairSplitSample s = simulate_pair(model, policy, t, rng);
        out.split_times[i] = s.split_time;  // equals t when censored: E[t ^ T]
        censored[i] = s.censored ? 1 : 0;
    });
    out.expected_split_time = estimate_from(out.split_times);
    std::size_t n_censored = 0;
    for (char c : censored) n_censored += c;
    out.censored_fraction = static_cast<double>(n_censored) / static_cast<double>(n_pairs);
    if (out.censored_fraction > 0.25)
        throw PreconditionError("censoring-excessive: over 25% of pairs did not split by t");

    const double phi0p = profile.phi0prime;
    const double phi2_m1 = phi_derivatives(model, -1.0, policy.epsilon).d2;
    out.cov_pred_1 = out.expected_split_time.mean * (-profile.phi2_at_zero);
    out.cov_pred_2 = out.expected_split_time.mean * (-phi2_m1);

    std::vector<double> products(n_direct);
    const std::uint64_t joint_master = derive_seed(seed, kStreamRhs);
    parallel_map(n_direct, workers, [&](std::size_t i) {
        Rng rng(derive_seed(joint_master, i));
        const PairJointSample s = simulate_pair_joint(model, policy, t, rng);
        // V(x) = log I^x + t Phi'(0) has exact mean zero under the pair law
        products[i] = (s.xi_x - phi0p * t) * (s.xi_y - phi0p * t);
    });
    out.cov_direct = estimate_from(products);
    return out;
}

} // namespace fragscope
