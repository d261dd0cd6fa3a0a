#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "gsis/dynamics.hpp"
#include "gsis/errors.hpp"
#include "gsis/kernel.hpp"
#include "gsis/partition.hpp"
#include "gsis/spectrum.hpp"
#include "gsis/trajectory.hpp"

using namespace gsis;

namespace {

PartitionPtr uniform_part(std::size_t n) {
    return std::make_shared<const Partition>(Partition::uniform(n));
}

KernelSpec constant_kernel() {
    return make_discrete_block(uniform_part(1), {1.0});
}

double logistic(double u0, double alpha, double t) {
    // Solution of c' = alpha c (1 - c).
    return 1.0 / (1.0 + (1.0 / u0 - 1.0) * std::exp(-alpha * t));
}

} // namespace

TEST_CASE("SIS vector field on cell-constant states") {
    auto part = uniform_part(1);
    KernelSpec k = constant_kernel();
    Field u = Field::constant(part, 0.5);
    Field f = rhs(k, make_params(1.0, 0.0), u);
    CHECK(f[0] == doctest::Approx(0.25).epsilon(1e-15)); // (1-1/2)*(W u = 1/2)

    Field g = rhs(k, make_params(2.0, 1.0), u);
    CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-15)); // endemic state of beta=2, gamma=1
}

TEST_CASE("constant kernel reduces the flow to the logistic equation") {
    KernelSpec k = constant_kernel();
    auto part = partition_of(k);
    Field u0 = Field::constant(part, 1e-3);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    std::vector<double> ts = uniform_samples(0.0, 10.0, 0.25);
    Trajectory tr = integrate(k, make_params(1.0, 0.0), u0, 0.0, 10.0, cfg, ts);
    REQUIRE(tr.size() == ts.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(std::abs(tr.prevalence[i] - logistic(1e-3, 1.0, tr.times[i])) <= 1e-7);
    }
    // Summaries are consistent on a one-cell partition.
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(tr.c1[i] == doctest::Approx(tr.prevalence[i]).epsilon(1e-12));
        CHECK(tr.l2[i] == doctest::Approx(tr.prevalence[i]).epsilon(1e-12));
    }
}

TEST_CASE("integrate validates inputs and guards the domain") {
    KernelSpec k = constant_kernel();
    auto part = partition_of(k);
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate(k, make_params(1.0, 0.0), Field::constant(part, 1.2), 0.0, 1.0,
                              cfg, {}),
                    ValidationError);
    CHECK_THROWS_AS(integrate(k, make_params(1.0, 0.0), Field::constant(part, 0.1), 1.0, 1.0,
                              cfg, {}),
                    ValidationError);
}

TEST_CASE("uniform_samples covers the span with spacing <= dt") {
    std::vector<double> ts = uniform_samples(0.0, 1.0, 0.3);
    REQUIRE(ts.size() == 5);
    CHECK(ts.front() == 0.0);
    CHECK(ts.back() == 1.0);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        CHECK(ts[i] - ts[i - 1] <= 0.3 + 1e-12);
    }
    CHECK_THROWS_AS(uniform_samples(1.0, 0.0, 0.1), ValidationError);
}

TEST_CASE("linear flow of a two-block kernel matches the analytic semigroup") {
    // Generator on cell constants: M = beta W diag(w) - gamma I with
    // W = {0,1;1,0}, w = (1/2,1/2): M = -gamma I + (beta/2) S, S the swap.
    // e^{tM} = e^{-gamma t} (cosh(beta t/2) I + sinh(beta t/2) S).
    auto part = uniform_part(2);
    KernelSpec k = make_discrete_block(part, {0.0, 1.0, 1.0, 0.0});
    const double beta = 1.3, gamma = 0.4;
    EpidemicParams pr = make_params(beta, gamma);
    Field u0(part, {0.02, 0.05});

    auto exact = [&](double t, std::size_t i) {
        const double ch = std::cosh(0.5 * beta * t), sh = std::sinh(0.5 * beta * t);
        const double other = i == 0 ? u0[1] : u0[0];
        return std::exp(-gamma * t) * (ch * u0[i] + sh * other);
    };

    for (double t : {0.0, 0.7, 2.1}) {
        Field v = linear_solution(k, pr, u0, t, 2);
        CHECK(v[0] == doctest::Approx(exact(t, 0)).epsilon(1e-10));
        CHECK(v[1] == doctest::Approx(exact(t, 1)).epsilon(1e-10));
    }

    LinearFlow flow(k, pr, u0, 2);
    CHECK(flow.modes() == 2);
    Field v = flow.at(1.5);
    CHECK(v[0] == doctest::Approx(exact(1.5, 0)).epsilon(1e-10));
    CHECK(v[1] == doctest::Approx(exact(1.5, 1)).epsilon(1e-10));

    // Truncation to the leading mode only keeps the symmetric part.
    Field lead = linear_solution(k, pr, u0, 1.0, 1);
    const double c1 = 0.5 * (u0[0] + u0[1]); // <phi1, u0> with phi1 == 1
    const double a1 = beta * 0.5 - gamma;
    CHECK(lead[0] == doctest::Approx(c1 * std::exp(a1)).epsilon(1e-10));
    CHECK(lead[0] == doctest::Approx(lead[1]).epsilon(1e-12));
}

TEST_CASE("rank-one linear flow: K = 2 appends the zero-eigenspace remainder") {
    auto part = std::make_shared<const Partition>(Partition::from_weights({0.5, 0.5}));
    KernelSpec k = make_rank_one(2.0, Field(part, {1.0, 3.0}));
    Spectrum s = leading_eigenpair(k);
    const double beta = 1.0, gamma = 0.5;
    EpidemicParams pr = make_params(beta, gamma);
    Field u0(part, {0.01, 0.02});
    const double c1 = inner(s.phi1, u0);
    const double a1 = pr.alpha(s.lambda1);

    const double t = 1.7;
    Field v1 = linear_solution(k, pr, u0, t, 1);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(v1[i] == doctest::Approx(c1 * std::exp(a1 * t) * s.phi1[i]).epsilon(1e-12));
    }
    Field v2 = linear_solution(k, pr, u0, t, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const double rem = (u0[i] - c1 * s.phi1[i]) * std::exp(-gamma * t);
        CHECK(v2[i] == doctest::Approx(c1 * std::exp(a1 * t) * s.phi1[i] + rem).epsilon(1e-12));
    }
    CHECK_THROWS_AS(linear_solution(k, pr, u0, t, 3), TruncationError);
    CHECK_THROWS_AS(linear_solution(k, pr, u0, t, 0), TruncationError);
}

TEST_CASE("nonlinear solution never exceeds the exact linear flow") {
    auto part = uniform_part(2);
    KernelSpec k = make_discrete_block(part, {0.0, 1.0, 1.0, 0.0});
    EpidemicParams pr = make_params(2.0, 0.3);
    Field u0(part, {0.05, 0.01});
    IntegratorConfig cfg;
    std::vector<double> ts = uniform_samples(0.0, 4.0, 0.1);
    Trajectory tr = integrate(k, pr, u0, 0.0, 4.0, cfg, ts);
    LinearFlow flow(k, pr, u0, 2);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        Field v = flow.at(tr.times[i]);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(tr.states[i][j] <= v[j] + 1e-8);
        }
    }
}

TEST_CASE("endemic state: saturation, the scalar branch, and the fixed point agree") {
    // gamma = 0 saturates.
    KernelSpec k1 = constant_kernel();
    EndemicState sat = endemic_solve(k1, make_params(1.0, 0.0));
    CHECK(sat.method == "saturated");
    CHECK(sat.psi[0] == 1.0);
    CHECK(sat.residual <= 1e-15);

    // W == 1, beta = 2, gamma = 1: psi == 1/2 on both solver paths.
    EpidemicParams pr = make_params(2.0, 1.0);
    auto part = partition_of(k1);
    KernelSpec rank_one = make_rank_one(1.0, Field::constant(part, 1.0));

    EndemicState fp = endemic_solve(k1, pr, 1e-13);
    CHECK(fp.method == "fixed_point");
    CHECK(fp.psi[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fp.residual <= 1e-10);

    EndemicState bi = endemic_solve(rank_one, pr, 1e-13);
    CHECK(bi.method == "bisection");
    CHECK(bi.psi[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(bi.residual <= 1e-10);
    REQUIRE(bi.c_star.has_value());
    CHECK(*bi.c_star == doctest::Approx(0.5).epsilon(1e-10));

    CHECK(std::abs(bi.psi[0] - fp.psi[0]) <= 1e-8);

    // Explicit method selection works on kernels that admit both.
    EndemicState forced = endemic_solve(k1, pr, 1e-13, EndemicMethod::FixedPoint);
    CHECK(forced.method == "fixed_point");
    CHECK_THROWS_AS(endemic_solve(k1, pr, 1e-13, EndemicMethod::Bisection), ValidationError);
}

TEST_CASE("endemic state of a power-law kernel is self-consistent") {
    KernelSpec k = make_power_law(4.0, 0.4, 400);
    EpidemicParams pr = make_params(1.0, 1.0);
    EndemicState st = endemic_solve(k, pr, 1e-13);
    CHECK(st.method == "bisection");
    CHECK(st.residual <= 1e-10);
    REQUIRE(st.c_star.has_value());

    // psi = beta lambda1 c phi / (gamma + beta lambda1 c phi) with c = <phi1, psi>.
    Spectrum s = leading_eigenpair(k);
    CHECK(inner(s.phi1, st.psi) == doctest::Approx(*st.c_star).epsilon(1e-10));
    const double bl = pr.beta * s.lambda1;
    for (std::size_t i = 0; i < st.psi.size(); i += 37) {
        const double z = bl * *st.c_star * s.phi1[i];
        CHECK(st.psi[i] == doctest::Approx(z / (pr.gamma + z)).epsilon(1e-10));
    }
}

TEST_CASE("endemic solver rejects subcritical parameters") {
    KernelSpec k = constant_kernel();
    CHECK_THROWS_AS(endemic_solve(k, make_params(1.0, 2.0)), ValidationError);
    CHECK_THROWS_AS(endemic_solve(k, make_params(1.0, 1.0)), ValidationError);
}

TEST_CASE("endemic state is a fixed point of the flow") {
    auto part = std::make_shared<const Partition>(Partition::from_weights({0.3, 0.7}));
    KernelSpec k = make_discrete_block(part, {3.0, 1.0, 1.0, 2.0});
    EpidemicParams pr = make_params(1.5, 1.0);
    EndemicState st = endemic_solve(k, pr, 1e-13);
    Field f = rhs(k, pr, st.psi);
    CHECK(norm_l2(f) <= 1e-10);

    // Integrating from psi stays at psi.
    IntegratorConfig cfg;
    std::vector<double> ts = uniform_samples(0.0, 5.0, 1.0);
    Trajectory tr = integrate(k, pr, st.psi, 0.0, 5.0, cfg, ts);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        Field u(part, tr.states[i]);
        Field diff = axpby(1.0, u, -1.0, st.psi);
        CHECK(norm_l2(diff) <= 1e-7);
    }
}

TEST_CASE("linearization audit: eigen-directed start nails the leading term") {
    auto part = uniform_part(2);
    KernelSpec k = make_discrete_block(part, {0.0, 1.0, 1.0, 0.0});
    EpidemicParams pr = make_params(3.0, 0.5); // alpha1 = 1, alpha2 = -2
    Spectrum s = leading_eigenpair(k);
    Field u0 = axpby(1e-4, s.phi1, 0.0, s.phi1);
    BoundReport rep = verify_linearization_bounds(k, pr, u0, 1e-2);
    CHECK(rep.t_bar == doctest::Approx(std::log(1e2)).epsilon(1e-10));
    CHECK(rep.ratio_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.leading_term_deviation <= 1e-10); // v stays exactly on phi1
    CHECK(rep.leading_term_ok);
    CHECK(rep.linear_error_ok);
    CHECK(rep.sup_u_minus_v <= rep.linear_error_bound);
    CHECK(rep.has_discrete_bound);
    CHECK(rep.discrete_ok);
    CHECK(rep.discrete_bound == doctest::Approx(2.0).epsilon(1e-12)); // 1/(1 * 1/2)
}

TEST_CASE("linearization audit: uniform start on the constant kernel") {
    KernelSpec k = constant_kernel();
    Field u0 = Field::constant(partition_of(k), 1e-4);
    BoundReport rep = verify_linearization_bounds(k, make_params(1.0, 0.0), u0, 1e-2);
    CHECK(rep.linear_error_ok);
    CHECK(rep.leading_term_ok);
    CHECK(rep.has_discrete_bound);
    CHECK(rep.ratio_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.discrete_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.discrete_ok);
    // The scalar case is exactly u' = u(1-u) vs v' = v: the measured gap is
    // close to but below the bound.
    CHECK(rep.sup_u_minus_v > 0.5 * rep.linear_error_bound);
}

TEST_CASE("linearization audit validates the level") {
    KernelSpec k = constant_kernel();
    Field u0 = Field::constant(partition_of(k), 1e-2);
    // eps_prime <= c1(0): t_bar undefined.
    CHECK_THROWS_AS(verify_linearization_bounds(k, make_params(1.0, 0.0), u0, 1e-2),
                    ValidationError);
    CHECK_THROWS_AS(verify_linearization_bounds(k, make_params(1.0, 2.0), u0, 1e-1),
                    ValidationError);
}

TEST_CASE("monotone envelope: theta0 starts below the endemic state and grows") {
    KernelSpec k = constant_kernel();
    EpidemicParams pr = make_params(2.0, 1.0);
    const double theta0 = monotone_theta0(k, pr);
    CHECK(theta0 == doctest::Approx(0.25).epsilon(1e-10));
    MonotoneReport rep = monotone_envelope(k, pr, theta0, 0.0, 8.0);
    CHECK(rep.monotone);
    CHECK(rep.max_violation <= 1e-8);
    CHECK(rep.theta == theta0);
    // The envelope approaches the endemic state from below.
    CHECK(rep.trajectory.prevalence.back() <= 0.5 + 1e-6);
    CHECK(rep.trajectory.prevalence.back() > 0.45);
    CHECK_THROWS_AS(monotone_envelope(k, pr, 5.0, 0.0, 1.0), ValidationError);
}

TEST_CASE("Lyapunov distance to the endemic state is non-increasing") {
    auto part = uniform_part(2);
    KernelSpec k = make_discrete_block(part, {0.0, 1.0, 1.0, 0.0});
    EpidemicParams pr = make_params(3.0, 0.5);
    EndemicState st = endemic_solve(k, pr, 1e-13);
    IntegratorConfig cfg;
    std::vector<double> ts = uniform_samples(0.0, 12.0, 0.1);
    for (double c0 : {0.9, 0.01}) {
        Field u0 = Field::constant(part, c0);
        Trajectory tr = integrate(k, pr, u0, 0.0, 12.0, cfg, ts);
        double prev = -1.0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            Field u(part, tr.states[i]);
            const double d = norm_l2(axpby(1.0, u, -1.0, st.psi));
            if (prev >= 0.0) {
                CHECK(d <= prev + 1e-8);
            }
            prev = d;
        }
        CHECK(prev <= 1e-3); // converged to psi by t = 12
    }
}

TEST_CASE("trajectory deviation scales linearly with a kernel perturbation") {
    auto part = uniform_part(2);
    KernelSpec w = make_discrete_block(part, {0.0, 1.0, 1.0, 0.0});
    auto perturbed = [&](double s) {
        return make_discrete_block(part, {0.0 + 0.1 * s, 1.0 + 0.05 * s,
                                          1.0 + 0.05 * s, 0.0 + 0.1 * s});
    };
    CHECK(kernel_distance(w, perturbed(0.5)) ==
          doctest::Approx(0.5 * kernel_distance(w, perturbed(1.0))).epsilon(1e-12));

    EpidemicParams pr = make_params(1.0, 0.5);
    Field u0 = Field::constant(part, 0.1);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    std::vector<double> ts = uniform_samples(0.0, 5.0, 0.05);
    Trajectory base = integrate(w, pr, u0, 0.0, 5.0, cfg, ts);
    auto sup_dist = [&](const KernelSpec& k2) {
        Trajectory tr = integrate(k2, pr, u0, 0.0, 5.0, cfg, ts);
        double sup = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            Field a(part, base.states[i]);
            Field b(part, tr.states[i]);
            sup = std::max(sup, norm_l2(axpby(1.0, a, -1.0, b)));
        }
        return sup;
    };
    const double d_full = sup_dist(perturbed(1.0));
    const double d_half = sup_dist(perturbed(0.5));
    CHECK(d_full > 0.0);
    CHECK(d_half / d_full == doctest::Approx(0.5).epsilon(0.1));
}
