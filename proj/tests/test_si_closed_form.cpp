#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "gsis/dynamics.hpp"
#include "gsis/errors.hpp"
#include "gsis/kernel.hpp"
#include "gsis/partition.hpp"
#include "gsis/si_closed_form.hpp"
#include "gsis/spectrum.hpp"

using namespace gsis;

namespace {

KernelSpec constant_rank_one() {
    auto part = std::make_shared<const Partition>(Partition::uniform(1));
    return make_rank_one(1.0, Field::constant(part, 1.0));
}

} // namespace

TEST_CASE("scalar closed form: anchor, F, and the exact logistic orbit") {
    KernelSpec k = constant_rank_one();
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));
    CHECK(cf.phi1_bar == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cf.omega0 == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(cf.lambda1 == doctest::Approx(1.0));

    // phi1 == 1: F(omega) = Ubar(omega) = 1 - e^{-omega}.
    CHECK(F_eval(cf, 0.0) == 0.0);
    for (double w : {0.1, 0.7, 2.0, 9.0}) {
        CHECK(F_eval(cf, w) == doctest::Approx(1.0 - std::exp(-w)).epsilon(1e-14));
        CHECK(Ubar(cf, w) == doctest::Approx(1.0 - std::exp(-w)).epsilon(1e-14));
    }

    // Omega' = 1 - e^{-Omega} anchored at Ubar = 1/2 integrates to
    // Omega(t) = log(1 + e^t); the prevalence is the logistic curve. The
    // 1e-9 agreement below is global error over ~10 time units, so the
    // per-step tolerance has to sit a few orders below it.
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-15;
    std::vector<double> grid;
    for (int i = -10; i <= 10; ++i) grid.push_back(0.5 * i);
    OmegaCurve oc = omega_solve(cf, grid, cfg);
    REQUIRE(oc.t.size() == grid.size());
    CHECK_FALSE(oc.underflow);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = oc.t[i];
        CHECK(std::abs(oc.omega[i] - std::log1p(std::exp(t))) <= 1e-9);
        CHECK(std::abs(oc.prevalence[i] - std::exp(t) / (1.0 + std::exp(t))) <= 1e-9);
    }
    // The t = 0 grid point carries the anchor exactly.
    CHECK(oc.omega[10] == cf.omega0);
}

TEST_CASE("closed-form states: limits and the time-zero anchor") {
    KernelSpec k = constant_rank_one();
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));

    Field zero = si_state_at(cf, 0.0);
    CHECK(zero[0] == 0.0);
    Field deep = si_state_at(cf, 500.0);
    CHECK(deep[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(si_state_at(cf, -0.5), ValidationError);

    Field at0 = si_state(cf, 0.0);
    CHECK(at0[0] == doctest::Approx(0.5).epsilon(1e-12));
    Field at2 = si_state(cf, 2.0);
    CHECK(at2[0] == doctest::Approx(std::exp(2.0) / (1.0 + std::exp(2.0))).epsilon(1e-7));
}

TEST_CASE("re-anchoring omega0 shifts the orbit in time (semigroup property)") {
    KernelSpec k = make_power_law(1.0, 0.4, 400);
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-11;
    cfg.abs_tol = 1e-14;

    std::vector<double> grid;
    for (int i = 0; i <= 8; ++i) grid.push_back(-2.0 + 0.5 * i);
    OmegaCurve base = omega_solve(cf, grid, cfg);

    const double shift = 1.5;
    SIClosedForm cf2 = cf;
    std::vector<double> at_shift = {shift};
    cf2.omega0 = omega_solve(cf, at_shift, cfg).omega[0];

    std::vector<double> grid2;
    for (double t : grid) grid2.push_back(t - shift);
    OmegaCurve moved = omega_solve(cf2, grid2, cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(moved.omega[i] - base.omega[i]) <= 1e-9);
    }
}

TEST_CASE("F is 1-Lipschitz and monotone on the power-law kernel") {
    KernelSpec k = make_power_law(1.0, 0.4, 800);
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));
    const std::vector<double> ws = {0.0, 0.05, 0.31, 1.0, 2.7, 5.0, 11.0, 30.0};
    for (std::size_t i = 1; i < ws.size(); ++i) {
        const double df = F_eval(cf, ws[i]) - F_eval(cf, ws[i - 1]);
        CHECK(df >= 0.0);
        CHECK(df <= (ws[i] - ws[i - 1]) + 1e-12);
        CHECK(Ubar(cf, ws[i]) > Ubar(cf, ws[i - 1]));
    }
    CHECK(F_eval(cf, 1e9) == doctest::Approx(cf.phi1_bar).epsilon(1e-9));
    CHECK_THROWS_AS(F_eval(cf, -1.0), ValidationError);
    CHECK_THROWS_AS(Ubar(cf, -0.01), ValidationError);
}

TEST_CASE("chi curve of the constant kernel is u(1-u) exactly") {
    KernelSpec k = constant_rank_one();
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));
    ChiCurve curve = chi_curve(cf, 100);
    REQUIRE(curve.prevalence.size() == 100);
    CHECK(curve.phi1_bar == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < curve.prevalence.size(); ++i) {
        const double u = curve.prevalence[i];
        CHECK(std::abs(curve.si_links[i] - u * (1.0 - u)) <= 1e-10);
        if (i > 0) CHECK(curve.prevalence[i] > curve.prevalence[i - 1]);
    }
    CHECK(chi_at(cf, 0.3) == doctest::Approx(0.21).epsilon(1e-10));
    CHECK(chi_at(cf, 0.5) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("chi stays below the parabola cap phi1_bar^2/4") {
    KernelSpec k = make_power_law(1.0, 0.4, 800);
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));
    ChiCurve curve = chi_curve(cf, 64);
    for (double links : curve.si_links) {
        CHECK(links <= 0.25 * cf.phi1_bar * cf.phi1_bar + 1e-12);
        CHECK(links >= 0.0);
    }
}

TEST_CASE("chi_at rejects unreachable prevalences") {
    // phi1 vanishes on the last fifth of [0,1]: Ubar saturates at 0.8.
    auto part = std::make_shared<const Partition>(Partition({0.0, 0.8, 1.0}));
    KernelSpec k = make_rank_one(1.0, Field(part, {1.0, 0.0}));
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));
    CHECK_NOTHROW(chi_at(cf, 0.5));
    CHECK_NOTHROW(chi_at(cf, 0.75));
    CHECK_THROWS_AS(chi_at(cf, 0.9), SaturationError);
    CHECK_THROWS_AS(chi_at(cf, 1.0), SaturationError);
    CHECK_THROWS_AS(chi_at(cf, 0.0), ValidationError);
    CHECK_THROWS_AS(chi_at(cf, -0.2), ValidationError);
}

TEST_CASE("annealed generating-function path agrees with the quadrature path") {
    // Degrees {1,3}, p(k) = 1/2: lambda1 = 5/2, so beta = 0.4 normalizes time.
    KernelSpec k = build_annealed({1.0, 3.0}, {0.5, 0.5});
    SIClosedForm cf = make_si_closed_form(k, make_params(0.4, 0.0));
    REQUIRE(cf.annealed.has_value());
    for (double w : {0.0, 0.2, 1.0, 2.3, 6.0}) {
        AnnealedEval ge = annealed_generating(cf, w);
        CHECK(ge.ubar == doctest::Approx(Ubar(cf, w)).epsilon(1e-10));
        CHECK(ge.links == doctest::Approx(F_eval(cf, w)).epsilon(1e-10));
    }
    // And the hand formula at one point: G(x) = (e^x + e^{3x})/2, s = sqrt(5).
    const double w = 1.0, s5 = std::sqrt(5.0);
    const double g = 0.5 * (std::exp(-w / s5) + std::exp(-3.0 * w / s5));
    const double gp = 0.5 * (std::exp(-w / s5) + 3.0 * std::exp(-3.0 * w / s5));
    CHECK(Ubar(cf, w) == doctest::Approx(1.0 - g).epsilon(1e-12));
    CHECK(F_eval(cf, w) == doctest::Approx((2.0 - gp) / s5).epsilon(1e-12));
}

TEST_CASE("closed form is rejected off its domain") {
    KernelSpec k = constant_rank_one();
    CHECK_THROWS_AS(make_si_closed_form(k, make_params(1.0, 0.5)), ValidationError);
    CHECK_THROWS_AS(make_si_closed_form(k, make_params(2.0, 0.0)), ValidationError);

    // A matrix kernel with a genuine second eigenvalue is not rank one.
    auto part = std::make_shared<const Partition>(Partition::uniform(2));
    KernelSpec swap = make_discrete_block(part, {0.0, 1.0, 1.0, 0.0});
    CHECK_THROWS_AS(make_si_closed_form(swap, make_params(2.0, 0.0)), ValidationError);

    // A one-cell block is effectively rank one and passes.
    auto p1 = std::make_shared<const Partition>(Partition::uniform(1));
    KernelSpec block1 = make_discrete_block(p1, {1.0});
    CHECK_NOTHROW(make_si_closed_form(block1, make_params(1.0, 0.0)));
}

TEST_CASE("omega_solve validates its grid") {
    KernelSpec k = constant_rank_one();
    SIClosedForm cf = make_si_closed_form(k, make_params(1.0, 0.0));
    CHECK_THROWS_AS(omega_solve(cf, {}), ValidationError);
    CHECK_THROWS_AS(omega_solve(cf, {0.0, 0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(omega_solve(cf, {1.0, 0.5}), ValidationError);
}

TEST_CASE("near-critical curve approximates the endemic plateau") {
    KernelSpec k = constant_rank_one();
    EpidemicParams pr = make_params(1.05, 1.0); // alpha1 = 0.05
    Spectrum s = leading_eigenpair(k);
    std::vector<double> grid = uniform_samples(-40.0, 400.0, 10.0);
    Trajectory tr = near_critical_curve(s, pr, grid);
    REQUIRE(tr.size() == grid.size());

    // c(0) = 1/2: the t = 0 state is half the plateau.
    const double at0 = tr.prevalence_at(0.0);
    CHECK(at0 == doctest::Approx(0.5 * 0.05).epsilon(1e-9));

    // Late-time plateau (beta lambda1 - gamma) phi1 vs the true endemic state:
    // agreement to first order in the distance from criticality.
    EndemicState st = endemic_solve(k, pr, 1e-13);
    const double plateau = tr.prevalence.back();
    CHECK(std::abs(plateau - integral(st.psi)) / integral(st.psi) <= 0.10);

    // Exact logistic profile in c.
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double c = 1.0 / (1.0 + std::exp(-0.05 * tr.times[i]));
        CHECK(tr.prevalence[i] == doctest::Approx(0.05 * c).epsilon(1e-9));
    }

    CHECK_THROWS_AS(near_critical_curve(s, make_params(1.0, 2.0), grid), ValidationError);
}
