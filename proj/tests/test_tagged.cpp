#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fragscope/errors.hpp"
#include "fragscope/exponent.hpp"
#include "fragscope/model.hpp"
#include "fragscope/stats.hpp"
#include "fragscope/tagged.hpp"

using namespace fragscope;

namespace {

const DislocationModel kBinary = DislocationModel::binary_uniform();
const DislocationModel kTernary = DislocationModel::ternary_deterministic();

} // namespace

TEST_CASE("ternary under P: every jump is log 3, events at rate 1") {
    const auto policy = TruncationPolicy::none(kTernary);
    const auto profile = solve_pbar(kTernary);
    Rng rng(10);
    Accumulator xi1;
    for (int i = 0; i < 20000; ++i) {
        const TaggedPath path = simulate_tagged(kTernary, policy, 1.0, Measure::P, profile, rng);
        for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
            const double jump = path.cum_xi[k] - (k == 0 ? 0.0 : path.cum_xi[k - 1]);
            CHECK(jump == doctest::Approx(std::log(3.0)).epsilon(1e-12));
        }
        xi1.push(xi_at(path, 1.0));
    }
    // E[xi_1] = Phi'(0) = log 3
    const MCEstimate est = xi1.estimate();
    CHECK(std::fabs(est.mean - std::log(3.0)) < 3.0 * est.stderr_of_mean);
}

TEST_CASE("binary-uniform under P: E[xi_1] = 1/2") {
    const auto policy = TruncationPolicy::none(kBinary);
    const auto profile = solve_pbar(kBinary);
    Rng rng(11);
    Accumulator xi1;
    for (int i = 0; i < 100000; ++i)
        xi1.push(xi_at(simulate_tagged(kBinary, policy, 1.0, Measure::P, profile, rng), 1.0));
    const MCEstimate est = xi1.estimate();
    CHECK(std::fabs(est.mean - 0.5) < 3.0 * est.stderr_of_mean);
}

TEST_CASE("empirical Laplace transform matches exp(-Phi_eps(p)) under P") {
    struct Case {
        DislocationModel model;
        double eps;
    };
    const std::vector<Case> cases = {{kBinary, 0.0},
                                     {kTernary, 0.0},
                                     {DislocationModel::binary_powerlaw(1.5), 0.02}};
    int case_id = 0;
    for (const auto& cs : cases) {
        const auto policy = TruncationPolicy::make(cs.model, cs.eps);
        const auto profile = solve_pbar(cs.model, cs.eps);
        std::vector<Accumulator> acc(3);
        const double ps[3] = {0.5, 1.0, 2.0};
        Rng rng(derive_seed(13, case_id++));
        for (int i = 0; i < 100000; ++i) {
            const TaggedPath path =
                simulate_tagged(cs.model, policy, 1.0, Measure::P, profile, rng);
            const double xi = xi_at(path, 1.0);
            for (int k = 0; k < 3; ++k) acc[k].push(std::exp(-ps[k] * xi));
        }
        for (int k = 0; k < 3; ++k) {
            const MCEstimate est = acc[k].estimate();
            const double target = std::exp(-phi(cs.model, ps[k], cs.eps));
            CHECK(std::fabs(est.mean - target) < 3.0 * est.stderr_of_mean);
        }
    }
}

TEST_CASE("binary-uniform under Q: zeta has zero mean and variance -Phi''(pbar)") {
    const auto policy = TruncationPolicy::none(kBinary);
    const auto profile = solve_pbar(kBinary);
    Rng rng(14);
    Accumulator4 z1;
    for (int i = 0; i < 200000; ++i) {
        const TaggedPath path = simulate_tagged(kBinary, policy, 1.0, Measure::Q, profile, rng);
        z1.push(zeta(path, 1.0));
    }
    const double se_mean = std::sqrt(z1.sample_variance() / static_cast<double>(z1.n));
    CHECK(std::fabs(z1.mean) < 3.0 * se_mean);
    const double target_var = 4.0 / std::pow(2.0 + std::sqrt(2.0), 3.0);  // -Phi''(sqrt 2)
    CHECK(target_var == doctest::Approx(0.100505).epsilon(1e-5));
    CHECK(std::fabs(z1.sample_variance() - target_var) < 3.0 * z1.stderr_of_variance());
}

TEST_CASE("Q variance scales linearly in t") {
    const auto policy = TruncationPolicy::none(kTernary);
    const auto profile = solve_pbar(kTernary);
    Rng rng(15);
    Accumulator4 z;
    const double t = 3.0;
    for (int i = 0; i < 100000; ++i)
        z.push(zeta(simulate_tagged(kTernary, policy, t, Measure::Q, profile, rng), t));
    const double se_mean = std::sqrt(z.sample_variance() / static_cast<double>(z.n));
    CHECK(std::fabs(z.mean) < 3.0 * se_mean);
    CHECK(std::fabs(z.sample_variance() - t * (-profile.phi2_at_pbar)) <
          3.0 * z.stderr_of_variance());
}

TEST_CASE("change of measure consistency: P-average of weight * F = Q-average of F") {
    const auto policy = TruncationPolicy::none(kBinary);
    const auto profile = solve_pbar(kBinary);
    const double t = 1.5;
    auto functional = [&](const TaggedPath& path) {
        return running_min(path, t) >= -0.5 ? 1.0 : 0.0;
    };
    Rng rng_p(16), rng_q(17);
    Accumulator p_side, q_side;
    for (int i = 0; i < 200000; ++i) {
        const TaggedPath pp = simulate_tagged(kBinary, policy, t, Measure::P, profile, rng_p);
        p_side.push(change_of_measure_weight(pp, profile, t) * functional(pp));
        const TaggedPath qq = simulate_tagged(kBinary, policy, t, Measure::Q, profile, rng_q);
        q_side.push(functional(qq));
    }
    CHECK(std::fabs(zscore(p_side.estimate(), q_side.estimate())) < 3.0);
}

TEST_CASE("zeta evaluation and drift") {
    TaggedPath path;
    path.horizon = 2.0;
    path.drift_c = 0.334;
    path.jump_times = {0.5};
    path.cum_xi = {std::log(3.0)};
    CHECK(zeta(path, 0.0) == 0.0);
    CHECK(zeta(path, 1.0) == doctest::Approx(std::log(3.0) - 0.334).epsilon(1e-15));
    // between jumps zeta falls linearly with slope -c
    const double z1 = zeta(path, 1.0), z2 = zeta(path, 1.5);
    CHECK(z2 - z1 == doctest::Approx(-0.334 * 0.5).epsilon(1e-12));
    CHECK_THROWS_AS((void)zeta(path, 3.0), PreconditionError);
}

TEST_CASE("running_min: pure drift and single-jump cases") {
    TaggedPath path;
    path.horizon = 4.0;
    path.drift_c = 0.25;
    SUBCASE("no jumps") {
        CHECK(running_min(path, 3.0) == doctest::Approx(-0.75).epsilon(1e-15));
    }
    SUBCASE("single jump") {
        path.jump_times = {1.0};
        path.cum_xi = {2.0};
        // min of (0 - 0.25 s) on [0,1] is -0.25; after the jump zeta = 2 - 0.25 s
        CHECK(running_min(path, 0.5) == doctest::Approx(-0.125).epsilon(1e-15));
        CHECK(running_min(path, 4.0) == doctest::Approx(-0.25).epsilon(1e-15));
    }
}

TEST_CASE("running_min agrees with a dense-grid evaluation") {
    const auto policy = TruncationPolicy::none(kBinary);
    const auto profile = solve_pbar(kBinary);
    Rng rng(18);
    for (int rep = 0; rep < 100; ++rep) {
        const TaggedPath path = simulate_tagged(kBinary, policy, 2.0, Measure::P, profile, rng);
        const double exact = running_min(path, 2.0);
        double grid_min = 0.0;
        for (int i = 0; i <= 20000; ++i) grid_min = std::min(grid_min, zeta(path, i * 1e-4));
        CHECK(grid_min >= exact - 1e-12);
        CHECK(grid_min - exact <= profile.c * 1e-4 + 1e-12);
        CHECK(exact <= 0.0);  // zeta starts at 0 and drifts down first
    }
}

TEST_CASE("pair split times: exponential with the separation rate") {
    // ternary: separation probability per event is 2/3, so T ~ Exp(2/3)
    const auto policy_t = TruncationPolicy::none(kTernary);
    Rng rng(19);
    Accumulator t_tern;
    int censored = 0;
    for (int i = 0; i < 100000; ++i) {
        const PairSplitSample s = simulate_pair(kTernary, policy_t, 40.0, rng);
        if (s.censored) ++censored;
        else t_tern.push(s.split_time);
        CHECK(s.split_time > 0.0);
    }
    CHECK(censored < 5);  // P(T > 40) = e^{-80/3}
    MCEstimate est = t_tern.estimate();
    CHECK(std::fabs(est.mean - 1.5) < 3.0 * est.stderr_of_mean);

    // binary-uniform: separation probability 1/3, E[T] = 3
    const auto policy_b = TruncationPolicy::none(kBinary);
    Accumulator t_bin;
    for (int i = 0; i < 100000; ++i) {
        const PairSplitSample s = simulate_pair(kBinary, policy_b, 200.0, rng);
        if (!s.censored) t_bin.push(s.split_time);
    }
    est = t_bin.estimate();
    CHECK(std::fabs(est.mean - 3.0) < 3.0 * est.stderr_of_mean);
}

TEST_CASE("pair stay-jumps follow the size-biased-squared law") {
    // binary-uniform: the block kept by both tags has density 3 b^2, so the
    // jump -log B is Exp(3); the common fragment at a fixed time, given no
    // split, is a compound Poisson with rate 2/3 of such jumps
    const auto policy = TruncationPolicy::none(kBinary);
    Rng rng(20);
    const double s_fix = 2.0;
    Accumulator4 depth;
    for (int i = 0; i < 400000; ++i) {
        const PairSplitSample s = simulate_pair(kBinary, policy, s_fix, rng);
        if (s.censored) depth.push(s.common_neglog_at_split);
    }
    REQUIRE(depth.n > 1000);
    // mean (2/3) s E[J] = (2/3) 2 (1/3) = 4/9; variance (2/3) s E[J^2] = (4/3)(2/9)
    const double mean_target = 4.0 / 9.0;
    const double var_target = 8.0 / 27.0;
    const double se_mean = std::sqrt(depth.sample_variance() / static_cast<double>(depth.n));
    CHECK(std::fabs(depth.mean - mean_target) < 3.0 * se_mean);
    CHECK(std::fabs(depth.sample_variance() - var_target) < 3.0 * depth.stderr_of_variance());
}

TEST_CASE("coupled censoring horizons: later split means deeper common fragment") {
    const auto policy = TruncationPolicy::none(kBinary);
    for (int rep = 0; rep < 200; ++rep) {
        Rng rng1(derive_seed(21, rep)), rng2(derive_seed(21, rep));
        const PairSplitSample early = simulate_pair(kBinary, policy, 1.0, rng1);
        const PairSplitSample late = simulate_pair(kBinary, policy, 8.0, rng2);
        CHECK(early.split_time <= late.split_time + 1e-15);
        CHECK(early.common_neglog_at_split <= late.common_neglog_at_split + 1e-15);
    }
}

TEST_CASE("joint pair continuation: marginals match the single-tag law") {
    const auto policy = TruncationPolicy::none(kBinary);
    const auto profile = solve_pbar(kBinary);
    Rng rng(22);
    const double t = 6.0;
    Accumulator xi_x, xi_y;
    for (int i = 0; i < 60000; ++i) {
        const PairJointSample s = simulate_pair_joint(kBinary, policy, t, rng);
        xi_x.push(s.xi_x);
        xi_y.push(s.xi_y);
    }
    // each tag alone is a plain tagged fragment: E[xi_t] = t Phi'(0) = 3
    const MCEstimate ex = xi_x.estimate(), ey = xi_y.estimate();
    CHECK(std::fabs(ex.mean - t * profile.phi0prime) < 3.0 * ex.stderr_of_mean);
    CHECK(std::fabs(ey.mean - t * profile.phi0prime) < 3.0 * ey.stderr_of_mean);
}

TEST_CASE("xi is nondecreasing with strictly positive jumps") {
    const auto policy = TruncationPolicy::make(DislocationModel::binary_powerlaw(1.5), 0.01);
    const auto profile = solve_pbar(DislocationModel::binary_powerlaw(1.5), 0.01);
    Rng rng(23);
    const TaggedPath path = simulate_tagged(DislocationModel::binary_powerlaw(1.5), policy, 0.5,
                                            Measure::P, profile, rng);
    double prev = 0.0;
    for (double v : path.cum_xi) {
        CHECK(v > prev);
        prev = v;
    }
}
