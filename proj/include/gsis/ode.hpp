#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace gsis {

/// Adaptive embedded Runge-Kutta settings. fixed_step > 0 disables the error
/// controller and steps at exactly that size (convergence-order studies).
///
/// The defaults are deliberately tight. Saturating SI states on graded
/// power-law meshes only stay affordable when each steep cell reaches 1
/// exactly and its derivative turns off; that transit completes only while
/// steps stay in the monotone part of the stability region, which these
/// tolerances enforce. At 1e-8 the controller instead parks on the stability
/// boundary and the steepest cell hovers below 1 indefinitely (measured:
/// 25k steps vs 400 for the same span, and unbounded for longer horizons).
struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;   // 0 = unlimited
    double fixed_step = 0.0; // 0 = adaptive
    std::string method = "dopri5";
};

struct IntegratorStats {
    std::size_t steps = 0; // accepted
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;

    IntegratorStats& operator+=(const IntegratorStats& o) {
        steps += o.steps;
        rejected += o.rejected;
        rhs_evals += o.rhs_evals;
        return *this;
    }
};

/// dydt = f(t, y); dydt is pre-sized to y.size().
using RhsFn = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

/// Receives interpolated states at requested sample times together with the
/// exact right-hand side there (for cubic Hermite resampling downstream).
using SampleSink =
    std::function<void(double, const std::vector<double>&, const std::vector<double>&)>;

/// Called with every candidate state that passed error control, before it is
/// committed or sampled. Throwing DomainViolationError rejects the candidate:
/// the solver retries at half the step (a boundary overshoot the error norm
/// averaged away is a step artifact, not a property of the flow) and lets the
/// violation propagate once the step size bottoms out or stepping is fixed.
/// Any other exception aborts immediately. Guards live here so violations
/// carry dynamics context, not solver context.
using StateGuard = std::function<void(double, const std::vector<double>&)>;

/// Dormand-Prince 5(4) with 4th-order dense output, integrating y from t0 to
/// t1 (either direction). sample_times must be sorted in integration direction
/// and lie within [min(t0,t1), max(t0,t1)]; each is evaluated via the dense
/// interpolant of the covering step. y holds the final state on return.
///
/// Errors: step-size underflow -> SolverError (stiffness or tolerance
/// pathology); a guard still rejecting at the smallest admissible step ->
/// its DomainViolationError; invalid config -> ValidationError.
IntegratorStats integrate_ode(const RhsFn& rhs, std::vector<double>& y, double t0, double t1,
                              const IntegratorConfig& cfg,
                              const std::vector<double>& sample_times, const SampleSink& sink,
                              const StateGuard& guard = {});

} // namespace gsis
