#include <doctest.h>

#include <cmath>
#include <vector>

#include "gsis/errors.hpp"
#include "gsis/ode.hpp"

using namespace gsis;

namespace {

double logistic(double u0, double t) { return 1.0 / (1.0 + (1.0 / u0 - 1.0) * std::exp(-t)); }

const RhsFn logistic_rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = y[0] * (1.0 - y[0]);
};

} // namespace

TEST_CASE("adaptive integration of the logistic equation hits tight tolerances") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    std::vector<double> y = {1e-3};
    std::vector<double> ts;
    for (int i = 0; i <= 40; ++i) ts.push_back(0.5 * i);
    double max_err = 0.0;
    IntegratorStats st = integrate_ode(
        logistic_rhs, y, 0.0, 20.0, cfg, ts,
        [&](double t, const std::vector<double>& yi, const std::vector<double>&) {
            max_err = std::max(max_err, std::abs(yi[0] - logistic(1e-3, t)));
        });
    CHECK(max_err <= 1e-8);
    CHECK(std::abs(y[0] - logistic(1e-3, 20.0)) <= 1e-10);
    CHECK(st.steps > 0);
    CHECK(st.rhs_evals >= 6 * st.steps);
}

TEST_CASE("dense output is evaluated at the requested times, endpoints included") {
    IntegratorConfig cfg;
    std::vector<double> y = {0.25};
    std::vector<double> seen;
    const std::vector<double> ts = {0.0, 0.313, 1.0, 1.77, 2.0};
    integrate_ode(logistic_rhs, y, 0.0, 2.0, cfg, ts,
                  [&](double t, const std::vector<double>& yi, const std::vector<double>& dyi) {
                      seen.push_back(t);
                      CHECK(yi[0] == doctest::Approx(logistic(0.25, t)).epsilon(1e-7));
                      CHECK(dyi[0] == doctest::Approx(yi[0] * (1.0 - yi[0])).epsilon(1e-9));
                  });
    CHECK(seen == ts);
}

TEST_CASE("fixed-step mode shows fifth-order convergence on y' = y") {
    const RhsFn rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[0];
    };
    auto err_at = [&](double h) {
        IntegratorConfig cfg;
        cfg.fixed_step = h;
        std::vector<double> y = {1.0};
        integrate_ode(rhs, y, 0.0, 1.0, cfg, {}, {});
        return std::abs(y[0] - std::exp(1.0));
    };
    const double e1 = err_at(0.1);
    const double e2 = err_at(0.05);
    CHECK(e1 > 0.0);
    // Order 5: halving the step should cut the error by ~32; demand >= 16.
    CHECK(e1 / e2 >= 16.0);
}

TEST_CASE("backward integration recovers decay") {
    const RhsFn rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[0];
    };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    std::vector<double> y = {1.0};
    std::vector<double> sorted_desc = {0.0, -0.5, -1.0};
    integrate_ode(rhs, y, 0.0, -1.0, cfg, sorted_desc,
                  [&](double t, const std::vector<double>& yi, const std::vector<double>&) {
                      CHECK(yi[0] == doctest::Approx(std::exp(t)).epsilon(1e-10));
                  });
    CHECK(y[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("a persistent guard violation surfaces the caller's exception") {
    // The flow genuinely crosses 1/2, so no step size satisfies the guard;
    // the solver must give up with the guard's own error, not a generic one.
    IntegratorConfig cfg;
    std::vector<double> y = {0.4};
    CHECK_THROWS_AS(
        integrate_ode(logistic_rhs, y, 0.0, 10.0, cfg, {}, {},
                      [](double t, const std::vector<double>& yi) {
                          if (yi[0] > 0.5) {
                              throw DomainViolationError("test.guard", "crossed 1/2", t);
                          }
                      }),
        DomainViolationError);
}

TEST_CASE("a transient guard violation rejects the step and the run completes") {
    IntegratorConfig cfg;
    std::vector<double> y = {0.4};
    int vetoes = 0;
    IntegratorStats st =
        integrate_ode(logistic_rhs, y, 0.0, 5.0, cfg, {}, {},
                      [&](double, const std::vector<double>&) {
                          if (vetoes < 3) {
                              ++vetoes;
                              throw DomainViolationError("test.guard", "transient veto", 0.0);
                          }
                      });
    CHECK(vetoes == 3);
    CHECK(st.rejected >= 3);
    CHECK(std::abs(y[0] - logistic(0.4, 5.0)) <= 1e-7);
}

TEST_CASE("fixed-step runs surface guard violations immediately") {
    // With the controller disabled there is no smaller step to retry at.
    IntegratorConfig cfg;
    cfg.fixed_step = 0.5;
    std::vector<double> y = {0.4};
    int calls = 0;
    CHECK_THROWS_AS(integrate_ode(logistic_rhs, y, 0.0, 10.0, cfg, {}, {},
                                  [&](double t, const std::vector<double>&) {
                                      ++calls;
                                      throw DomainViolationError("test.guard", "veto", t);
                                  }),
                    DomainViolationError);
    CHECK(calls == 1);
}

TEST_CASE("integrator configuration is validated") {
    std::vector<double> y = {1.0};
    IntegratorConfig bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_ode(logistic_rhs, y, 0.0, 1.0, bad, {}, {}), ValidationError);
    bad = IntegratorConfig{};
    bad.method = "rk4";
    CHECK_THROWS_AS(integrate_ode(logistic_rhs, y, 0.0, 1.0, bad, {}, {}), ValidationError);
    bad = IntegratorConfig{};
    bad.abs_tol = -1.0;
    CHECK_THROWS_AS(integrate_ode(logistic_rhs, y, 0.0, 1.0, bad, {}, {}), ValidationError);
    // Sample time outside the span.
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate_ode(logistic_rhs, y, 0.0, 1.0, cfg, {2.0}, {}), ValidationError);
}

TEST_CASE("stats count rejected steps separately") {
    // A tolerance tight enough to force at least one rejection on a stiff-ish
    // transient: y' = -50 (y - cos t).
    const RhsFn rhs = [](double t, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = -50.0 * (y[0] - std::cos(t));
    };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-12;
    std::vector<double> y = {2.0};
    IntegratorStats st = integrate_ode(rhs, y, 0.0, 3.0, cfg, {}, {});
    CHECK(st.steps > 10);
    CHECK(st.rhs_evals >= 6 * (st.steps + st.rejected));
}
