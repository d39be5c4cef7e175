#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fragscope/errors.hpp"
#include "fragscope/exponent.hpp"
#include "fragscope/model.hpp"

using namespace fragscope;

namespace {

// Independent oracle for the power-law exponent, via the Beta function:
//   Phi(p) = 1/(1-a) - (p+1) B(2-a, p+1)/(1-a) - 1/(p+2-a),   p > max(a-2, -1)
double phi_powerlaw_beta_oracle(double p, double a) {
    const double logB = std::lgamma(2.0 - a) + std::lgamma(p + 1.0) - std::lgamma(p + 3.0 - a);
    return 1.0 / (1.0 - a) - (p + 1.0) * std::exp(logB) / (1.0 - a) - 1.0 / (p + 2.0 - a);
}

// Independent bisection for the ternary critical index on
// 3^p = 1 + (1+p) log 3, the defining equation written out by hand.
double ternary_pbar_bisection() {
    const double L = std::log(3.0);
    auto g = [L](double p) { return std::exp(p * L) - 1.0 - (1.0 + p) * L; };
    double lo = 0.5, hi = 2.0;
    REQUIRE(g(lo) < 0.0);
    REQUIRE(g(hi) > 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("binary-uniform closed forms") {
    const auto bu = DislocationModel::binary_uniform();
    CHECK(std::fabs(phi(bu, 0.0)) < 1e-12);
    CHECK(phi(bu, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (double p : {-0.5, 0.3, 1.0, 2.5, 5.0}) {
        CHECK(phi(bu, p) == doctest::Approx(p / (p + 2.0)).epsilon(1e-12));
        const PhiDerivatives d = phi_derivatives(bu, p);
        CHECK(d.d1 == doctest::Approx(2.0 / ((p + 2.0) * (p + 2.0))).epsilon(1e-12));
        CHECK(d.d2 == doctest::Approx(-4.0 / std::pow(p + 2.0, 3.0)).epsilon(1e-12));
    }
    // Phi'(sqrt 2) = 3 - 2 sqrt 2, cross-checked by a central difference of
    // the closed form at step 1e-6
    const double s2 = std::sqrt(2.0);
    const double analytic = 3.0 - 2.0 * s2;
    CHECK(phi_derivatives(bu, s2).d1 == doctest::Approx(analytic).epsilon(1e-12));
    const double fd = (phi(bu, s2 + 1e-6) - phi(bu, s2 - 1e-6)) / 2e-6;
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-7));
}

TEST_CASE("ternary closed forms") {
    const auto td = DislocationModel::ternary_deterministic();
    CHECK(std::fabs(phi(td, 0.0)) < 1e-12);
    CHECK(phi(td, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(phi_derivatives(td, 0.0).d1 == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(phi_derivatives(td, 0.0).d1 == doctest::Approx(1.098612).epsilon(1e-6));
}

TEST_CASE("quadrature route agrees with the closed forms to 1e-9") {
    const auto bu = DislocationModel::binary_uniform();
    const auto td = DislocationModel::ternary_deterministic();
    for (double p : {-0.5, -0.25, 0.0, 0.5, 1.0, 2.0, 3.5, 5.0}) {
        CHECK(std::fabs(phi_quadrature(bu, p) - phi(bu, p)) < 1e-9);
        CHECK(std::fabs(phi_quadrature(td, p) - phi(td, p)) < 1e-9);
    }
    // and on a truncated region
    for (double p : {0.0, 1.0, 3.0})
        CHECK(std::fabs(phi_quadrature(bu, p, 0.05) - phi(bu, p, 0.05)) < 1e-9);
}

TEST_CASE("powerlaw series+quadrature matches the Beta-function oracle") {
    for (double a : {1.2, 1.5, 1.8}) {
        const auto pl = DislocationModel::binary_powerlaw(a);
        CHECK(std::fabs(phi(pl, 0.0)) < 1e-10);
        for (double p : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            const double oracle = phi_powerlaw_beta_oracle(p, a);
            CHECK(phi(pl, p) == doctest::Approx(oracle).epsilon(1e-9));
        }
        // derivatives against central differences of the oracle
        for (double p : {0.5, 1.0, 2.0}) {
            const double h = 1e-5;
            const double fd1 =
                (phi_powerlaw_beta_oracle(p + h, a) - phi_powerlaw_beta_oracle(p - h, a)) / (2 * h);
            const double fd2 = (phi_powerlaw_beta_oracle(p + h, a) -
                                2 * phi_powerlaw_beta_oracle(p, a) +
                                phi_powerlaw_beta_oracle(p - h, a)) /
                               (h * h);
            const PhiDerivatives d = phi_derivatives(pl, p);
            CHECK(d.d1 == doctest::Approx(fd1).epsilon(1e-6));
            CHECK(d.d2 == doctest::Approx(fd2).epsilon(1e-4));
        }
    }
}

TEST_CASE("Phi increasing and concave on the grid") {
    std::vector<DislocationModel> models = {DislocationModel::binary_uniform(),
                                            DislocationModel::ternary_deterministic(),
                                            DislocationModel::binary_powerlaw(1.5)};
    for (const auto& model : models) {
        std::vector<double> grid;
        for (double p = -0.5; p <= 5.0 + 1e-9; p += 0.25)
            if (p > model.p_lower() + 0.2) grid.push_back(p);
        std::vector<double> values;
        for (double p : grid) values.push_back(phi(model, p));
        for (std::size_t i = 0; i + 1 < values.size(); ++i)
            CHECK(values[i + 1] > values[i]);  // strictly increasing
        for (std::size_t i = 0; i + 2 < values.size(); ++i)
            CHECK(values[i + 2] - 2 * values[i + 1] + values[i] < 0.0);  // strictly concave
    }
}

TEST_CASE("solve_pbar: binary-uniform hits the algebraic root sqrt(2)") {
    const auto bu = DislocationModel::binary_uniform();
    const ExponentProfile prof = solve_pbar(bu);
    CHECK(prof.pbar == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(prof.c == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(prof.l == doctest::Approx(1.5 * (std::sqrt(2.0) - 1.0)).epsilon(1e-9));
    CHECK(prof.phi0prime == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(prof.phi2_at_zero == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(prof.phi2_at_pbar < 0.0);
    CHECK(std::fabs(prof.pbar_residual) < 1e-10);
}

TEST_CASE("solve_pbar: ternary against an independent bisection") {
    const auto td = DislocationModel::ternary_deterministic();
    const ExponentProfile prof = solve_pbar(td);
    const double golden = ternary_pbar_bisection();
    CHECK(prof.pbar == doctest::Approx(golden).epsilon(1e-9));
    CHECK(std::fabs(phi(td, prof.pbar) / (1.0 + prof.pbar) - phi_derivatives(td, prof.pbar).d1) <
          1e-12);
    CHECK(prof.phi2_at_pbar < 0.0);
    CHECK(prof.phi2_at_zero < 0.0);
}

TEST_CASE("solve_pbar on the power law satisfies the defining equation") {
    const auto pl = DislocationModel::binary_powerlaw(1.5);
    const ExponentProfile prof = solve_pbar(pl);
    CHECK(prof.pbar > 0.0);
    CHECK(std::fabs(phi(pl, prof.pbar) / (1.0 + prof.pbar) - prof.c) < 1e-10);
    CHECK(prof.c < prof.phi0prime);
}

TEST_CASE("c < Phi'(0) strictly for every built-in") {
    for (const auto& model : {DislocationModel::binary_uniform(),
                              DislocationModel::ternary_deterministic(),
                              DislocationModel::binary_powerlaw(1.5)}) {
        const ExponentProfile prof = solve_pbar(model);
        CHECK(prof.c < prof.phi0prime);
    }
}

TEST_CASE("scale consistency: rates scaled by lambda") {
    std::vector<CustomAtom> base{{1.0, {0.6, 0.4}}, {0.5, {0.5, 0.3, 0.2}}};
    std::vector<CustomAtom> scaled = base;
    const double lambda = 3.7;
    for (auto& atom : scaled) atom.rate *= lambda;
    const auto m1 = DislocationModel::custom_finite(base);
    const auto m2 = DislocationModel::custom_finite(scaled);
    for (double p : {0.5, 1.0, 2.0})
        CHECK(phi(m2, p) == doctest::Approx(lambda * phi(m1, p)).epsilon(1e-12));
    const ExponentProfile p1 = solve_pbar(m1);
    const ExponentProfile p2 = solve_pbar(m2);
    CHECK(p2.pbar == doctest::Approx(p1.pbar).epsilon(1e-9));
    CHECK(p2.c == doctest::Approx(lambda * p1.c).epsilon(1e-9));
}

TEST_CASE("psi alignment: qbar = pbar + 1") {
    for (const auto& model :
         {DislocationModel::binary_uniform(), DislocationModel::ternary_deterministic()}) {
        const ExponentProfile prof = solve_pbar(model);
        const PsiAlignment align = psi_and_alignment(model, prof);
        CHECK(align.residual < 1e-8);
    }
    const auto bu = DislocationModel::binary_uniform();
    const ExponentProfile prof = solve_pbar(bu);
    CHECK(psi_and_alignment(bu, prof).qbar ==
          doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));
    // Psi(1) = 1 for every model since Phi(0) = 0
    CHECK(psi(bu, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi(DislocationModel::ternary_deterministic(), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum endpoints") {
    const auto bu = DislocationModel::binary_uniform();
    const ExponentProfile prof = solve_pbar(bu);

    // typical rate: dimension one
    const SpectrumPoint typical = spectrum(bu, prof, prof.phi0prime);
    CHECK(typical.q_beta == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(typical.dim_euclid == doctest::Approx(1.0).epsilon(1e-9));

    // extremal rate: dimension zero, q = pbar
    const SpectrumPoint extremal = spectrum(bu, prof, prof.c);
    CHECK(extremal.q_beta == doctest::Approx(prof.pbar).epsilon(1e-8));
    CHECK(std::fabs(extremal.dim_euclid) < 1e-7);

    // below the extremal rate the formula goes negative: out of range
    CHECK_THROWS_AS((void)spectrum(bu, prof, prof.c * 0.8), PreconditionError);
}

TEST_CASE("intrinsic spectrum endpoint aligns with qbar") {
    const auto bu = DislocationModel::binary_uniform();
    const ExponentProfile prof = solve_pbar(bu);
    const PsiAlignment align = psi_and_alignment(bu, prof);
    const double alpha_plus = psi_prime(bu, align.qbar);
    const FAlphaPoint fp = f_of_alpha(bu, alpha_plus);
    CHECK(fp.p_alpha == doctest::Approx(align.qbar).epsilon(1e-7));
    CHECK(std::fabs(fp.f_alpha) < 1e-9);
}

TEST_CASE("divergent exponent guard") {
    const auto bu = DislocationModel::binary_uniform();
    CHECK_THROWS_AS((void)phi(bu, -2.0), PreconditionError);
    const auto pl = DislocationModel::binary_powerlaw(1.5);
    CHECK_THROWS_AS((void)phi(pl, -0.5), PreconditionError);
    CHECK_NOTHROW((void)phi(pl, -0.3));
}

TEST_CASE("truncated exponent of the power law via quadrature") {
    const auto pl = DislocationModel::binary_powerlaw(1.5);
    // conservation survives truncation: Phi_eps(0) = 0
    for (double eps : {0.05, 0.01}) CHECK(std::fabs(phi(pl, 0.0, eps)) < 1e-10);
    // truncated exponent approaches the full one as eps -> 0; the dropped
    // region near zero contributes about (p+1) int_0^eps s^{1-a} ds, so the
    // gap scales like 2 (p+1) sqrt(eps) for a = 3/2
    const double full = phi(pl, 1.0);
    double prev_gap = 1e9;
    for (double eps : {0.05, 0.01, 0.002}) {
        const double gap = std::fabs(phi(pl, 1.0, eps) - full);
        CHECK(gap < prev_gap + 1e-12);
        CHECK(gap < 2.0 * 2.0 * std::sqrt(eps) * 1.1);
        prev_gap = gap;
    }
}
