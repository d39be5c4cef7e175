#pragma once

#include <cstdint>
#include <vector>

#include "fragscope/engine.hpp"
#include "fragscope/exponent.hpp"
#include "fragscope/model.hpp"
#include "fragscope/stats.hpp"
#include "fragscope/tagged.hpp"

namespace fragscope {

// Path functionals admitted on both sides of the Many-to-One identity.
// Restricting to these three keeps the tilted-side evaluation exact.
struct FSpec {
    enum class Kind { Const, Terminal, RunningMin } kind = Kind::Const;
    double param = 0.0;  // a for {zeta_t <= a}; k for {min zeta >= -k}
};

struct Mt1Result {
    MCEstimate lhs;  // particle-sum side, full-engine runs
    MCEstimate rhs;  // tilted tagged-path side
    double zscore = 0.0;
    std::vector<double> lhs_values;  // per-replica raw
    std::vector<double> rhs_values;
};

// E sum_{fragments} F(zeta path) versus Q-average of e^{(pbar+1) zeta_t} F.
// Finite models only: the identity is exact, truncation would bias it.
Mt1Result mt1_check(const DislocationModel& model, const FSpec& functional, double t,
                    std::size_t n_lhs, std::size_t n_rhs, std::uint64_t seed, unsigned workers);

// Least-squares fit on the design (t, log t, 1); the coefficients estimate
// the first-order rate and the log-correction of the largest fragment.
struct RegressionResult {
    double coef_t = 0.0;
    double coef_logt = 0.0;
    double intercept = 0.0;
    double stderr_t = 0.0;
    double stderr_logt = 0.0;
    std::vector<double> grid;
};

struct TheoremResult {
    RegressionResult regression;
    std::vector<double> mean_ratio;               // (-log max - c t) / log t, mean per grid time
    std::vector<std::vector<double>> neglog_max;  // [replica][grid index]
};

TheoremResult theorem_experiment(const DislocationModel& model, const TruncationPolicy& policy,
                                 const ExponentProfile& profile, const std::vector<double>& t_grid,
                                 std::size_t replicas, double prune_margin, std::uint64_t seed,
                                 unsigned workers);

struct GrowthResult {
    RegressionResult regression;  // coef_t is the growth rate; log t unused (0)
    std::vector<double> mean_count;
    std::vector<std::vector<std::int64_t>> counts;  // [replica][grid index]
};

// Fits log mean near-maximal count against t; stderr by delete-one
// jackknife over replicas.
GrowthResult growth_rate(const DislocationModel& model, const TruncationPolicy& policy,
                         const ExponentProfile& profile, double delta,
                         const std::vector<double>& t_grid, std::size_t replicas,
                         double prune_margin, std::uint64_t seed, unsigned workers);

struct CorrResult {
    MCEstimate expected_split_time;  // E[t ^ T]; censored pairs contribute t
    double censored_fraction = 0.0;
    double cov_pred_1 = 0.0;   // E[T] * (-Phi''(0))
    double cov_pred_2 = 0.0;   // E[T] * (-Phi''(-1))
    MCEstimate cov_direct;     // paired-tag estimate of Cov(log I^x, log I^y)
    std::vector<double> split_times;  // per-pair raw (capped at t)
};

CorrResult correlation_experiment(const DislocationModel& model, const TruncationPolicy& policy,
                                  const ExponentProfile& profile, double t, std::size_t n_pairs,
                                  std::size_t n_direct, std::uint64_t seed, unsigned workers);

} // namespace fragscope
