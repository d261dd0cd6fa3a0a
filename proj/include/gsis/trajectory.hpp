#pragma once

#include <cstddef>
#include <vector>

#include "gsis/kernel.hpp"
#include "gsis/ode.hpp"

namespace gsis {

/// Time-stamped states of one integration run. States are the raw integrator
/// values (inside [-1e-8, 1+1e-8] by the domain guard); the scalar summaries
/// are computed from clipped copies. derivs stores du/dt at each sample so
/// states can be resampled to cubic-Hermite accuracy between samples.
struct Trajectory {
    PartitionPtr partition;
    Field phi1; // eigenfunction the c1 summary is taken against
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> derivs;
    std::vector<double> prevalence;
    std::vector<double> c1;
    std::vector<double> l2;
    IntegratorStats stats;

    static constexpr double tol_state = 1e-8;

    std::size_t size() const { return times.size(); }
    double t_front() const { return times.front(); }
    double t_back() const { return times.back(); }

    /// Append one sample and its summaries (clipped for reporting only).
    void append(double t, const std::vector<double>& state, const std::vector<double>& deriv);

    Field state_field(std::size_t i) const { return Field(partition, states[i]); }

    /// Cubic Hermite interpolation between the two samples bracketing t.
    /// Throws InsufficientHorizonError outside [times.front(), times.back()].
    void state_at(double t, std::vector<double>& out) const;

    /// Linear interpolation of the stored scalar series at t.
    double c1_at(double t) const;
    double prevalence_at(double t) const;
    double l2_at(double t) const;

    /// First time the series (c1 or prevalence) reaches `level`, linear
    /// interpolation between samples; times.front() if already >= level.
    /// Distinguishes a saturated series (UnreachableLevelError) from one that
    /// was still growing when the trajectory ended (InsufficientHorizonError).
    double crossing_time(double level, bool use_prevalence) const;

private:
    std::size_t bracket(double t) const;
    double interp_series(const std::vector<double>& s, double t) const;
};

} // namespace gsis
