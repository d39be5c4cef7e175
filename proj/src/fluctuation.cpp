#include "fragscope/fluctuation.hpp"

#include <cmath>
#include <limits>

#include "fragscope/errors.hpp"
#include "fragscope/parallel.hpp"

namespace fragscope {

namespace {

constexpr std::size_t kChunk = 65536;

double draw_jump(const LevyModel& levy, Rng& rng) {
    return levy.jump_kind == LevyModel::JumpKind::Unit ? 1.0 : rng.exponential(levy.theta);
}

// Chunked Monte Carlo mean of per-path values: chunk c uses the stream
// derive_seed(seed, c) and chunks merge in index order, so the result is
// independent of the worker count.
template <typename PerPath>
MCEstimate chunked_mc(std::size_t n, std::uint64_t seed, unsigned workers, const PerPath& value) {
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Accumulator> acc(chunks);
    parallel_map(chunks, workers, [&](std::size_t c) {
        Rng rng(derive_seed(seed, c));
        const std::size_t begin = c * kChunk;
        const std::size_t end = begin + kChunk < n ? begin + kChunk : n;
        Accumulator a;
        for (std::size_t i = begin; i < end; ++i) a.push(value(rng));
        acc[c] = a;
    });
    Accumulator total;
    for (const Accumulator& a : acc) total.merge(a);
    return total.estimate();
}

// Streamed path functionals over [0, span]: running minimum is attained
// just before a jump or at the endpoint because X decays linearly between
// jumps. Window minima for the two-window event are collected in one pass.
struct PathStats {
    double x_end;        // X at span
    double min_first;    // min over [0, t_split]
    double min_second;   // min over [t_split, span]
};

PathStats stream_path(const LevyModel& levy, double span, double t_split, Rng& rng) {
    const double c = levy.drift;
    double clock = 0.0;
    double y = 0.0;  // jump sum
    double min_first = 0.0, min_second = 0.0;
    bool second_started = false;
    double min_cur = 0.0;  // running min of the active window
    for (;;) {
        const double gap = rng.exponential(levy.lambda);
        double t_jump = clock + gap;
        if (!second_started && t_jump > t_split) {
            // close the first window at t_split (no jump inside (clock, t_split])
            min_first = std::min(min_cur, y - c * t_split);
            second_started = true;
            min_cur = y - c * t_split;  // window minima include the boundary value
        }
        if (t_jump > span) {
            const double x_end = y - c * span;
            const double min_last = std::min(min_cur, x_end);
            if (!second_started) {
                // degenerate call with t_split >= span
                min_first = min_last;
                min_second = x_end;
            } else {
                min_second = min_last;
            }
            return PathStats{x_end, min_first, min_second};
        }
        // value just before the jump is a candidate minimum
        min_cur = std::min(min_cur, y - c * t_jump);
        y += draw_jump(levy, rng);
        clock = t_jump;
    }
}

} // namespace

LevyModel LevyModel::compensated_poisson(double lambda) {
    if (!(lambda > 0.0)) throw PreconditionError("compensated_poisson: lambda must be positive");
    LevyModel m;
    m.jump_kind = JumpKind::Unit;
    m.lambda = lambda;
    m.drift = lambda;  // lambda * E[jump], zero mean by construction
    m.var_rate = lambda;
    if (std::fabs(m.lambda * 1.0 - m.drift) > 1e-12)
        throw InvariantError("levy model mean is not zero");
    return m;
}

LevyModel LevyModel::compensated_compound_exponential(double lambda, double theta) {
    if (!(lambda > 0.0 && theta > 0.0))
        throw PreconditionError("compensated_compound_exponential: parameters must be positive");
    LevyModel m;
    m.jump_kind = JumpKind::Exponential;
    m.lambda = lambda;
    m.theta = theta;
    m.drift = lambda / theta;
    m.var_rate = lambda * 2.0 / (theta * theta);
    if (std::fabs(m.lambda / m.theta - m.drift) > 1e-12)
        throw InvariantError("levy model mean is not zero");
    return m;
}

MCEstimate small_ball(const LevyModel& levy, double t, double r, double h, std::size_t n,
                      std::uint64_t seed, unsigned workers, double window_floor) {
    if (!(t > 0.0)) throw PreconditionError("small_ball: t must be positive");
    if (!(h >= window_floor))
        throw PreconditionError("small_ball: window below the configured floor");
    if (n < 10000) throw PreconditionError("small_ball: need n >= 1e4");
    const double scale = std::sqrt(t) / h;
    return chunked_mc(n, seed, workers, [&](Rng& rng) {
        double x;
        if (levy.jump_kind == LevyModel::JumpKind::Unit) {
            x = static_cast<double>(rng.poisson(levy.lambda * t)) - levy.drift * t;
        } else {
            const std::uint64_t jumps = rng.poisson(levy.lambda * t);
            double y = 0.0;
            for (std::uint64_t j = 0; j < jumps; ++j) y += rng.exponential(levy.theta);
            x = y - levy.drift * t;
        }
        return (r <= x && x <= r + h) ? scale : 0.0;
    });
}

MCEstimate min_tail(const LevyModel& levy, double t, double u, std::size_t n, std::uint64_t seed,
                    unsigned workers) {
    if (!(t > 0.0)) throw PreconditionError("min_tail: t must be positive");
    if (!(u >= 0.0)) throw PreconditionError("min_tail: u must be nonnegative");
    const double scale = std::sqrt(t) / (u + 1.0);
    return chunked_mc(n, seed, workers, [&](Rng& rng) {
        const PathStats path = stream_path(levy, t, t, rng);
        return path.min_first >= -u ? scale : 0.0;
    });
}

double corridor_bound_shape(double t, double f, double g) {
    const double a = std::min(f + 1.0, std::sqrt(t));
    const double b = std::min((g + f + 1.0) * (g + f + 1.0), t);
    return a * b / (t * std::sqrt(t));
}

MCEstimate corridor(const LevyModel& levy, double t, double f, double g, std::size_t n,
                    std::uint64_t seed, unsigned workers) {
    if (!(t > 0.0)) throw PreconditionError("corridor: t must be positive");
    if (!(f > 0.0)) throw PreconditionError("corridor: f must be positive");
    if (!(g >= -f)) throw PreconditionError("corridor: need g >= -f (event is empty otherwise)");
    const double scale = t * std::sqrt(t);
    return chunked_mc(n, seed, workers, [&](Rng& rng) {
        const PathStats path = stream_path(levy, t, t, rng);
        return (path.x_end <= g && path.min_first >= -f) ? scale : 0.0;
    });
}

MCEstimate liminf_event(const LevyModel& levy, double t, double alpha, double l_coef, double C,
                        std::size_t n, std::uint64_t seed, unsigned workers) {
    if (!(t > 1.0)) throw PreconditionError("liminf_event: t must exceed 1");
    if (!(alpha > 0.0)) throw PreconditionError("liminf_event: alpha must be positive");
    if (!(C > 0.0)) throw PreconditionError("liminf_event: C must be positive");
    const double f = l_coef * std::log(t);
    if (!(f >= alpha))
        throw PreconditionError("liminf_event: hypothesis f(t) >= alpha fails at this t");
    const double scale = t * std::sqrt(t);
    return chunked_mc(n, seed, workers, [&](Rng& rng) {
        const PathStats path = stream_path(levy, 2.0 * t, t, rng);
        const bool ok = path.min_first + alpha >= 0.0 && path.min_second + alpha >= f &&
                        f <= path.x_end + alpha && path.x_end + alpha < f + C;
        return ok ? scale : 0.0;
    });
}

ScalingFit fit_loglog(const std::vector<double>& grid, const std::vector<MCEstimate>& points) {
    if (grid.size() != points.size() || grid.size() < 5)
        throw PreconditionError("fit_loglog: need >= 5 grid points");
    std::vector<double> lx(grid.size()), ly(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(points[i].mean > 0.0))
            throw PreconditionError("fit_loglog: nonpositive estimate, cannot take logs");
        lx[i] = std::log(grid[i]);
        ly[i] = std::log(points[i].mean);
    }
    const LineFit f = line_fit(lx, ly);
    ScalingFit out;
    out.slope = f.slope;
    out.intercept = f.intercept;
    out.grid = grid;
    out.per_point = points;
    return out;
}

SummabilityResult summability_check(double alpha, int k, std::uint64_t N) {
    if (!(alpha > 0.0)) throw PreconditionError("summability_check: alpha must be positive");
    if (k < 1) throw PreconditionError("summability_check: k must be >= 1");
    if (N < 10) throw PreconditionError("summability_check: N must be >= 10");

    // terms n (1 - (log n)^-k)^{n^alpha}, accumulated through the log to
    // avoid spurious overflow of the power
    double sum = 0.0, comp = 0.0;
    for (std::uint64_t n = 4; n <= N; ++n) {
        const double ln = std::log(static_cast<double>(n));
        const double base = -std::pow(ln, -static_cast<double>(k));
        const double log_term = ln + std::pow(static_cast<double>(n), alpha) * std::log1p(base);
        const double term = std::exp(log_term);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    // Tail certificate: with h(n) = n^alpha/(log n)^k and log(1-y) <= -y,
    //   term(n) <= n exp(-h(N) (n/N)^{alpha/2})    for n >= N, log N >= 2k/alpha,
    // and substituting u = (n/N)^{alpha/2} with u^{q-1} <= e^{(q-1)(u-1)},
    //   tail <= (2 N^2/alpha) e^{-beta} / (beta - q + 1),  q = 4/alpha, beta = h(N).
    SummabilityResult out;
    out.partial_sum = sum;
    const double logN = std::log(static_cast<double>(N));
    const double q = 4.0 / alpha;
    const double beta = std::pow(static_cast<double>(N), alpha) / std::pow(logN, k);
    if (logN < 2.0 * static_cast<double>(k) / alpha || beta <= q) {
        out.tail_bound = std::numeric_limits<double>::infinity();
        out.tail_bound_log10 = std::numeric_limits<double>::infinity();
        return out;
    }
    const double log_tail = std::log(2.0 / alpha) + 2.0 * logN - beta - std::log(beta - q + 1.0);
    out.tail_bound_log10 = log_tail / std::log(10.0);
    out.tail_bound = std::exp(log_tail);  // may underflow to zero; log10 field keeps the value
    return out;
}

} // namespace fragscope
