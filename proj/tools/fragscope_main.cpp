// fragscope: configuration-driven experiments on homogeneous fragmentation
// processes. Every command writes manifest.json, summary.json and raw CSVs
// into the output directory; identical config + seed yields byte-identical
// raw outputs regardless of worker count.

#include <chrono>
#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fragscope/analysis.hpp"
#include "fragscope/artifacts.hpp"
#include "fragscope/config.hpp"
#include "fragscope/engine.hpp"
#include "fragscope/errors.hpp"
#include "fragscope/exponent.hpp"
#include "fragscope/fluctuation.hpp"
#include "fragscope/model.hpp"
#include "fragscope/parallel.hpp"
#include "fragscope/tagged.hpp"

namespace {

using nlohmann::json;
using namespace fragscope;

json estimate_json(const MCEstimate& e) {
    return json{{"mean", e.mean}, {"stderr", e.stderr_of_mean}, {"n", e.n}};
}

FSpec fspec_from(const ExperimentConfig& cfg) {
    FSpec f;
    if (cfg.fspec == "const") f.kind = FSpec::Kind::Const;
    else if (cfg.fspec == "terminal") f.kind = FSpec::Kind::Terminal;
    else if (cfg.fspec == "runmin") f.kind = FSpec::Kind::RunningMin;
    else throw PreconditionError("unknown F '" + cfg.fspec + "' (const|terminal|runmin)");
    f.param = cfg.f_param;
    return f;
}

LevyModel levy_from(const ExperimentConfig& cfg) {
    if (cfg.process == "poisson") return LevyModel::compensated_poisson(cfg.levy_lambda);
    if (cfg.process == "compound-exp")
        return LevyModel::compensated_compound_exponential(cfg.levy_lambda, cfg.levy_theta);
    throw PreconditionError("unknown process '" + cfg.process + "' (poisson|compound-exp)");
}

json profile_json(const ExponentProfile& p) {
    return json{{"pbar", p.pbar},
                {"c", p.c},
                {"l", p.l},
                {"phi0prime", p.phi0prime},
                {"phi2_at_pbar", p.phi2_at_pbar},
                {"phi2_at_zero", p.phi2_at_zero},
                {"pbar_residual", p.pbar_residual}};
}

void run_exponent(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const double eps = cfg.truncation_epsilon;
    const ExponentProfile profile = solve_pbar(model, eps);
    const PsiAlignment align = psi_and_alignment(model, profile, eps);

    json summary;
    summary["model"] = model.kind_name();
    summary["profile"] = profile_json(profile);
    summary["qbar"] = align.qbar;
    summary["qbar_residual"] = align.residual;
    if (!cfg.beta.empty()) {
        json pts = json::array();
        for (double b : cfg.beta) {
            const SpectrumPoint pt = spectrum(model, profile, b, eps);
            pts.push_back({{"beta", pt.beta},
                           {"q_beta", pt.q_beta},
                           {"dim_euclid", pt.dim_euclid},
                           {"dim_intrinsic", pt.dim_intrinsic}});
        }
        summary["spectrum"] = pts;
    }
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_simulate(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const TruncationPolicy policy = cfg.build_policy(model);
    const ExponentProfile profile = solve_pbar(model, cfg.truncation_epsilon);
    if (cfg.grid.empty()) throw PreconditionError("simulate: grid is required");
    if (cfg.replicas == 0) throw PreconditionError("simulate: replicas is required");

    EngineOptions options;
    options.horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.grid.back();
    options.grid = cfg.grid;
    options.prune_margin = cfg.prune_margin;
    options.near_max_delta = cfg.near_max_delta;

    std::vector<TrackerSeries> all(cfg.replicas);
    parallel_map(cfg.replicas, cfg.worker_count(), [&](std::size_t rep) {
        Rng rng(derive_seed(*cfg.seed, rep));
        all[rep] = run(model, policy, options, profile, rng);
    });

    auto csv = artifact.open_csv(
        "series", "replica_id,t,max_size,martingale,near_max_count,active_count,pruned_mass");
    for (std::size_t rep = 0; rep < all.size(); ++rep) {
        const TrackerSeries& s = all[rep];
        for (std::size_t i = 0; i < s.grid.size(); ++i)
            csv << rep << ',' << csv_double(s.grid[i]) << ',' << csv_double(s.max_size[i]) << ','
                << csv_double(s.martingale[i]) << ',' << s.near_max_count[i] << ','
                << s.active_count[i] << ',' << csv_double(s.pruned_mass[i]) << "\n";
    }

    Accumulator mart_at_end, max_at_end;
    std::uint64_t events = 0;
    for (const TrackerSeries& s : all) {
        if (!s.grid.empty()) {
            mart_at_end.push(s.martingale.back());
            max_at_end.push(s.max_size.back());
        }
        events += s.total_events;
    }
    json summary;
    summary["replicas"] = cfg.replicas;
    summary["total_events"] = events;
    summary["martingale_at_horizon"] = estimate_json(mart_at_end.estimate());
    summary["max_size_at_horizon"] = estimate_json(max_at_end.estimate());
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_tagged(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const TruncationPolicy policy = cfg.build_policy(model);
    const ExponentProfile profile = solve_pbar(model, cfg.truncation_epsilon);
    const Measure measure = cfg.measure == "Q" ? Measure::Q : Measure::P;
    if (cfg.measure != "P" && cfg.measure != "Q")
        throw PreconditionError("measure must be P or Q");
    const std::uint64_t n = cfg.n > 0 ? cfg.n : 1;
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.t;

    std::vector<TaggedPath> paths(n);
    parallel_map(n, cfg.worker_count(), [&](std::size_t i) {
        Rng rng(derive_seed(*cfg.seed, i));
        paths[i] = simulate_tagged(model, policy, horizon, measure, profile, rng);
    });

    auto csv = artifact.open_csv("paths", "path,time,jump");
    Accumulator zeta_end;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        double prev = 0.0;
        for (std::size_t j = 0; j < paths[i].jump_times.size(); ++j) {
            csv << i << ',' << csv_double(paths[i].jump_times[j]) << ','
                << csv_double(paths[i].cum_xi[j] - prev) << "\n";
            prev = paths[i].cum_xi[j];
        }
        zeta_end.push(zeta(paths[i], horizon));
    }
    json summary;
    summary["measure"] = cfg.measure;
    summary["horizon"] = horizon;
    summary["paths"] = n;
    if (n >= 2) summary["zeta_at_horizon"] = estimate_json(zeta_end.estimate());
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_pair(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const TruncationPolicy policy = cfg.build_policy(model);
    const std::uint64_t n = cfg.n > 0 ? cfg.n : 1000;
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : cfg.t;

    std::vector<PairSplitSample> samples(n);
    parallel_map(n, cfg.worker_count(), [&](std::size_t i) {
        Rng rng(derive_seed(*cfg.seed, i));
        samples[i] = simulate_pair(model, policy, horizon, rng);
    });

    auto csv = artifact.open_csv("pairs", "pair,split_time,censored,common_neglog_at_split");
    Accumulator capped;
    std::size_t censored = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        csv << i << ',' << csv_double(samples[i].split_time) << ','
            << (samples[i].censored ? 1 : 0) << ','
            << csv_double(samples[i].common_neglog_at_split) << "\n";
        capped.push(samples[i].split_time);
        censored += samples[i].censored ? 1 : 0;
    }
    json summary;
    summary["pairs"] = n;
    summary["expected_split_time_capped"] = estimate_json(capped.estimate());
    summary["censored_fraction"] = static_cast<double>(censored) / static_cast<double>(n);
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_mt1(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const Mt1Result res = mt1_check(model, fspec_from(cfg), cfg.t, cfg.n_lhs, cfg.n_rhs,
                                    *cfg.seed, cfg.worker_count());

    auto lhs_csv = artifact.open_csv("lhs", "replica,value");
    for (std::size_t i = 0; i < res.lhs_values.size(); ++i)
        lhs_csv << i << ',' << csv_double(res.lhs_values[i]) << "\n";
    auto rhs_csv = artifact.open_csv("rhs", "path,value");
    for (std::size_t i = 0; i < res.rhs_values.size(); ++i)
        rhs_csv << i << ',' << csv_double(res.rhs_values[i]) << "\n";

    json summary;
    summary["F"] = cfg.fspec;
    summary["t"] = cfg.t;
    summary["lhs"] = estimate_json(res.lhs);
    summary["rhs"] = estimate_json(res.rhs);
    summary["zscore"] = res.zscore;
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_theorem(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const TruncationPolicy policy = cfg.build_policy(model);
    const ExponentProfile profile = solve_pbar(model, cfg.truncation_epsilon);
    if (cfg.replicas < 2) throw PreconditionError("theorem: replicas is required (>= 2)");
    const TheoremResult res = theorem_experiment(model, policy, profile, cfg.grid, cfg.replicas,
                                                 cfg.prune_margin, *cfg.seed, cfg.worker_count());

    auto csv = artifact.open_csv("neglogmax", "replica,t,neg_log_max,ratio");
    for (std::size_t rep = 0; rep < res.neglog_max.size(); ++rep)
        for (std::size_t k = 0; k < cfg.grid.size(); ++k)
            csv << rep << ',' << csv_double(cfg.grid[k]) << ','
                << csv_double(res.neglog_max[rep][k]) << ','
                << csv_double((res.neglog_max[rep][k] - profile.c * cfg.grid[k]) /
                              std::log(cfg.grid[k]))
                << "\n";

    json summary;
    summary["profile"] = profile_json(profile);
    summary["coef_t"] = res.regression.coef_t;
    summary["stderr_t"] = res.regression.stderr_t;
    summary["coef_logt"] = res.regression.coef_logt;
    summary["stderr_logt"] = res.regression.stderr_logt;
    summary["intercept"] = res.regression.intercept;
    summary["mean_ratio"] = res.mean_ratio;
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_growth(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const TruncationPolicy policy = cfg.build_policy(model);
    const ExponentProfile profile = solve_pbar(model, cfg.truncation_epsilon);
    if (cfg.replicas < 2) throw PreconditionError("growth: replicas is required (>= 2)");
    const GrowthResult res = growth_rate(model, policy, profile, cfg.delta, cfg.grid, cfg.replicas,
                                         cfg.prune_margin, *cfg.seed, cfg.worker_count());

    auto csv = artifact.open_csv("counts", "replica,t,near_max_count");
    for (std::size_t rep = 0; rep < res.counts.size(); ++rep)
        for (std::size_t k = 0; k < cfg.grid.size(); ++k)
            csv << rep << ',' << csv_double(cfg.grid[k]) << ',' << res.counts[rep][k] << "\n";

    json summary;
    summary["delta"] = cfg.delta;
    summary["rho"] = res.regression.coef_t;
    summary["stderr_rho"] = res.regression.stderr_t;
    summary["intercept"] = res.regression.intercept;
    summary["mean_count"] = res.mean_count;
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_corr(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const DislocationModel model = cfg.build_model();
    const TruncationPolicy policy = cfg.build_policy(model);
    const ExponentProfile profile = solve_pbar(model, cfg.truncation_epsilon);
    const CorrResult res = correlation_experiment(model, policy, profile, cfg.t, cfg.n_pairs,
                                                  cfg.n_direct, *cfg.seed, cfg.worker_count());

    auto csv = artifact.open_csv("split_times", "pair,split_time_capped");
    for (std::size_t i = 0; i < res.split_times.size(); ++i)
        csv << i << ',' << csv_double(res.split_times[i]) << "\n";

    json summary;
    summary["t"] = cfg.t;
    summary["expected_split_time"] = estimate_json(res.expected_split_time);
    summary["censored_fraction"] = res.censored_fraction;
    summary["cov_pred_1"] = res.cov_pred_1;
    summary["cov_pred_2"] = res.cov_pred_2;
    summary["cov_direct"] = estimate_json(res.cov_direct);
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_fluct(const ExperimentConfig& cfg, RunArtifact& artifact) {
    json summary;
    summary["check"] = cfg.check;
    if (cfg.check == "sum") {
        const SummabilityResult res = summability_check(cfg.alpha, cfg.k, cfg.big_n);
        summary["partial_sum"] = res.partial_sum;
        summary["tail_bound"] = res.tail_bound;
        summary["tail_bound_log10"] = res.tail_bound_log10;
        artifact.write_summary(summary);
        std::cout << summary.dump(2) << "\n";
        return;
    }

    const LevyModel levy = levy_from(cfg);
    const std::vector<double> grid = cfg.grid.empty()
                                         ? std::vector<double>{4, 8, 16, 32, 64, 128, 256}
                                         : cfg.grid;
    // single-time events default to 1e6 paths; the t^{3/2}-scaled corridor
    // and liminf events are rarer and default to 1e7
    const bool rare = cfg.check == "corridor" || cfg.check == "liminf";
    const std::uint64_t n = cfg.n > 0 ? cfg.n : (rare ? 10000000 : 1000000);
    std::vector<MCEstimate> points;
    points.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const std::uint64_t point_seed = derive_seed(*cfg.seed, i);
        if (cfg.check == "smallball")
            points.push_back(small_ball(levy, t, cfg.r, cfg.h, n, point_seed, cfg.worker_count()));
        else if (cfg.check == "mintail")
            points.push_back(min_tail(levy, t, cfg.u, n, point_seed, cfg.worker_count()));
        else if (cfg.check == "corridor")
            points.push_back(corridor(levy, t, cfg.f, cfg.g, n, point_seed, cfg.worker_count()));
        else if (cfg.check == "liminf")
            points.push_back(
                liminf_event(levy, t, cfg.alpha, cfg.l_coef, cfg.cap_c, n, point_seed,
                             cfg.worker_count()));
        else
            throw PreconditionError("unknown check '" + cfg.check +
                                    "' (smallball|mintail|corridor|liminf|sum)");
    }

    auto csv = artifact.open_csv("points", "t,estimate,stderr,n");
    for (std::size_t i = 0; i < grid.size(); ++i)
        csv << csv_double(grid[i]) << ',' << csv_double(points[i].mean) << ','
            << csv_double(points[i].stderr_of_mean) << ',' << points[i].n << "\n";

    json pts = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i)
        pts.push_back({{"t", grid[i]},
                       {"estimate", points[i].mean},
                       {"stderr", points[i].stderr_of_mean}});
    summary["points"] = pts;
    bool all_positive = true;
    for (const auto& p : points) all_positive = all_positive && p.mean > 0.0;
    if (grid.size() >= 5 && all_positive) {
        const ScalingFit fit = fit_loglog(grid, points);
        summary["loglog_slope"] = fit.slope;
        summary["loglog_intercept"] = fit.intercept;
    }
    if (cfg.check == "corridor") {
        json bounds = json::array();
        for (double t : grid) bounds.push_back(corridor_bound_shape(t, cfg.f, cfg.g));
        summary["bound_shape"] = bounds;
    }
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

void run_sum(const ExperimentConfig& cfg, RunArtifact& artifact) {
    const SummabilityResult res = summability_check(cfg.alpha, cfg.k, cfg.big_n);
    json summary;
    summary["alpha"] = cfg.alpha;
    summary["k"] = cfg.k;
    summary["N"] = cfg.big_n;
    summary["partial_sum"] = res.partial_sum;
    summary["tail_bound"] = res.tail_bound;
    summary["tail_bound_log10"] = res.tail_bound_log10;
    artifact.write_summary(summary);
    std::cout << summary.dump(2) << "\n";
}

int dispatch(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    cfg.require_seed();
    RunArtifact artifact(cfg.output_dir, cfg);

    if (cfg.command == "exponent") run_exponent(cfg, artifact);
    else if (cfg.command == "simulate") run_simulate(cfg, artifact);
    else if (cfg.command == "tagged") run_tagged(cfg, artifact);
    else if (cfg.command == "pair") run_pair(cfg, artifact);
    else if (cfg.command == "mt1") run_mt1(cfg, artifact);
    else if (cfg.command == "theorem") run_theorem(cfg, artifact);
    else if (cfg.command == "growth") run_growth(cfg, artifact);
    else if (cfg.command == "corr") run_corr(cfg, artifact);
    else if (cfg.command == "fluct") run_fluct(cfg, artifact);
    else if (cfg.command == "sum") run_sum(cfg, artifact);
    else throw PreconditionError("unknown-command: " + cfg.command);

    const auto end = std::chrono::steady_clock::now();
    artifact.finalize_manifest(std::chrono::duration<double>(end - start).count());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fragscope: simulation and verification toolkit for conservative "
                 "homogeneous interval fragmentation processes"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string config_path;
    std::string grid_text, beta_text, atoms_text;
    long long seed_flag = -1;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (key = value lines)");
        sub->add_option("--model", cfg.model_kind,
                        "binary-uniform|ternary-deterministic|binary-powerlaw|custom-finite");
        sub->add_option("--a", cfg.model_a, "binary-powerlaw exponent, in (1,2)");
        sub->add_option("--atoms", atoms_text, "custom-finite atoms [[rate,[s1,s2,...]],...]");
        sub->add_option("--epsilon", cfg.truncation_epsilon, "truncation epsilon (0 = none)");
        sub->add_option("--seed", seed_flag, "master seed (mandatory for stochastic commands)");
        sub->add_option("--workers", cfg.workers, "worker pool size (env FRAGSCOPE_WORKERS)");
        sub->add_option("--out", cfg.output_dir, "output directory");
    };

    CLI::App* exponent = app.add_subcommand("exponent", "Levy exponent and derived constants");
    add_common(exponent);
    exponent->add_option("--beta", beta_text, "spectrum decay rates (comma list)");

    CLI::App* simulate = app.add_subcommand("simulate", "event-driven population simulation");
    add_common(simulate);
    simulate->add_option("--grid", grid_text, "tracker grid (comma list or start:step:stop)");
    simulate->add_option("--horizon", cfg.horizon, "horizon (default: last grid time)");
    simulate->add_option("--replicas", cfg.replicas, "number of replicas");
    simulate->add_option("--prune-margin", cfg.prune_margin, "pruning margin above c");
    simulate->add_option("--near-max-delta", cfg.near_max_delta, "delta for the near-max counter");

    CLI::App* tagged_cmd = app.add_subcommand("tagged", "tagged-fragment subordinator paths");
    add_common(tagged_cmd);
    tagged_cmd->add_option("--measure", cfg.measure, "P or Q");
    tagged_cmd->add_option("--horizon", cfg.horizon, "path horizon");
    tagged_cmd->add_option("--n", cfg.n, "number of paths");

    CLI::App* pair_cmd = app.add_subcommand("pair", "two-point split-time samples");
    add_common(pair_cmd);
    pair_cmd->add_option("--horizon", cfg.horizon, "censoring horizon");
    pair_cmd->add_option("--n", cfg.n, "number of pairs");

    CLI::App* mt1 = app.add_subcommand("mt1", "Many-to-One identity check");
    add_common(mt1);
    mt1->add_option("--t", cfg.t, "evaluation time");
    mt1->add_option("--F", cfg.fspec, "const|terminal|runmin");
    mt1->add_option("--F-param", cfg.f_param, "a for terminal, k for runmin");
    mt1->add_option("--n-lhs", cfg.n_lhs, "engine runs");
    mt1->add_option("--n-rhs", cfg.n_rhs, "tilted paths");

    CLI::App* theorem = app.add_subcommand("theorem", "largest-fragment regression");
    add_common(theorem);
    theorem->add_option("--grid", grid_text, "time grid");
    theorem->add_option("--replicas", cfg.replicas, "number of replicas");
    theorem->add_option("--prune-margin", cfg.prune_margin, "pruning margin above c");

    CLI::App* growth = app.add_subcommand("growth", "near-maximal set growth rate");
    add_common(growth);
    growth->add_option("--grid", grid_text, "time grid");
    growth->add_option("--replicas", cfg.replicas, "number of replicas");
    growth->add_option("--delta", cfg.delta, "c' = c + delta");
    growth->add_option("--prune-margin", cfg.prune_margin, "pruning margin above c");

    CLI::App* corr = app.add_subcommand("corr", "split times and covariance constants");
    add_common(corr);
    corr->add_option("--t", cfg.t, "evaluation time");
    corr->add_option("--n-pairs", cfg.n_pairs, "pairs for E[T]");
    corr->add_option("--n-direct", cfg.n_direct, "pairs for the direct covariance");

    CLI::App* fluct = app.add_subcommand("fluct", "Levy fluctuation estimates");
    add_common(fluct);
    fluct->add_option("--check", cfg.check, "smallball|mintail|corridor|liminf|sum");
    fluct->add_option("--process", cfg.process, "poisson|compound-exp");
    fluct->add_option("--lambda", cfg.levy_lambda, "jump rate");
    fluct->add_option("--theta", cfg.levy_theta, "exponential jump parameter");
    fluct->add_option("--grid", grid_text, "time grid");
    fluct->add_option("--n", cfg.n, "paths per grid point");
    fluct->add_option("--r", cfg.r, "window left end (smallball)");
    fluct->add_option("--width", cfg.h, "window width (smallball)");
    fluct->add_option("--u", cfg.u, "minimum level (mintail)");
    fluct->add_option("--f", cfg.f, "floor (corridor)");
    fluct->add_option("--g", cfg.g, "ceiling (corridor)");
    fluct->add_option("--alpha", cfg.alpha, "start offset (liminf) / exponent (sum)");
    fluct->add_option("--C", cfg.cap_c, "terminal window (liminf)");
    fluct->add_option("--l-coef", cfg.l_coef, "f(t) = l_coef log t (liminf)");
    fluct->add_option("--k", cfg.k, "log power (sum)");
    fluct->add_option("--N", cfg.big_n, "partial-sum cutoff (sum)");

    CLI::App* sum = app.add_subcommand("sum", "summability partial sum and tail bound");
    add_common(sum);
    sum->add_option("--alpha", cfg.alpha, "exponent alpha");
    sum->add_option("--k", cfg.k, "log power k");
    sum->add_option("--N", cfg.big_n, "partial-sum cutoff");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // contract: 0 on success/help, 1 on any usage error
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!config_path.empty()) {
            // file values form the base; a second parse pass lets explicit
            // flags override them (CLI11 assigns bound variables only when
            // the flag is actually given)
            ExperimentConfig fresh;
            apply_config_file(fresh, config_path);
            cfg = fresh;
            grid_text.clear();
            beta_text.clear();
            atoms_text.clear();
            seed_flag = -1;
            app.clear();
            app.parse(argc, argv);
        }
        cfg.command = app.get_subcommands().front()->get_name();
        if (!grid_text.empty()) cfg.grid = parse_grid(grid_text);
        if (!beta_text.empty()) cfg.beta = parse_grid(beta_text);
        if (!atoms_text.empty()) cfg.model_atoms = parse_atoms(atoms_text);
        if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
        return dispatch(cfg);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
