#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gsis/kernel.hpp"
#include "gsis/ode.hpp"
#include "gsis/spectrum.hpp"
#include "gsis/trajectory.hpp"

namespace gsis {

/// Closed-form machinery for the SI special case (gamma = 0) on an
/// effectively rank-one kernel with time normalized so beta*lambda1 = 1:
/// u(t,x) = 1 - e^{-Omega(t) phi1(x)} with Omega' = F(Omega). The anchor
/// omega0 fixes the translation freedom at prevalence 1/2, i.e.
/// Ubar(omega0) = 1/2 at t = 0.
struct SIClosedForm {
    Field phi1;
    double lambda1 = 0.0;
    double beta = 0.0;
    double phi1_bar = 0.0; // integral of phi1
    double omega0 = 0.0;   // Ubar(omega0) = 1/2
    std::optional<AnnealedInfo> annealed;
};

/// Requires gamma = 0, beta*lambda1 = 1 within 1e-9 (rescale time otherwise),
/// and a rank-one kernel (matrix kernels pass when |lambda2| <= 1e-8 lambda1).
SIClosedForm make_si_closed_form(const KernelSpec& k, const EpidemicParams& params);

/// F(omega) = integral of phi1 (1 - e^{-omega phi1}) dx; positive and
/// 1-Lipschitz for omega > 0. Negative omega is a domain error.
double F_eval(const SIClosedForm& cf, double omega);

/// Ubar(omega) = integral of (1 - e^{-omega phi1}) dx, the prevalence of the
/// closed-form state at parameter omega. Strictly increasing.
double Ubar(const SIClosedForm& cf, double omega);

/// Omega(t) on a sample grid, integrated from the t = 0 anchor in both
/// directions. The exact Omega stays positive for all finite t; underflow to
/// <= 0 during backward integration signals quadrature error and is reported,
/// not thrown (omega is clamped to 0 from the first such sample backwards).
struct OmegaCurve {
    std::vector<double> t;
    std::vector<double> omega;
    std::vector<double> prevalence;
    bool underflow = false;
    double underflow_t = 0.0;
};

OmegaCurve omega_solve(const SIClosedForm& cf, const std::vector<double>& t_grid,
                       const IntegratorConfig& cfg = {});

/// Closed-form state 1 - e^{-Omega(t) phi1} at one time (solves for Omega(t))
/// or directly at a given omega >= 0.
Field si_state(const SIClosedForm& cf, double t, const IntegratorConfig& cfg = {});
Field si_state_at(const SIClosedForm& cf, double omega);

/// The closed-form orbit as a Trajectory: states 1 - e^{-Omega phi1} and their
/// exact time derivatives F(Omega) phi1 e^{-Omega phi1} at the curve's samples.
Trajectory closed_form_trajectory(const SIClosedForm& cf, const OmegaCurve& curve);

/// Parametric samples of the prevalence-to-SI-links map
/// chi(Ubar(omega)) = F(omega) (phi1_bar - F(omega)). Unnormalized: both
/// coordinates are plain integrals over [0,1].
struct ChiCurve {
    std::vector<double> prevalence;
    std::vector<double> si_links;
    double phi1_bar = 0.0;
};

/// Samples omega log-spaced on [1e-6, omega_max] with omega_max grown until
/// Ubar(omega_max) > 1 - 1e-6 (or Ubar saturates below that).
ChiCurve chi_curve(const SIClosedForm& cf, std::size_t n_samples);

/// chi at one prevalence; inverts Ubar by bisection. Throws SaturationError
/// when ubar >= 1 or beyond the reachable supremum of Ubar.
double chi_at(const SIClosedForm& cf, double ubar);

/// Degree-distribution generating-function path for kernels built as
/// uncorrelated annealed networks: Ubar = 1 - G(-omega/sqrt(<k^2>)) and
/// F = (<k> - G'(-omega/sqrt(<k^2>))) / sqrt(<k^2>), G(x) = sum p(k) e^{x k}.
/// Must agree with the quadrature path to roundoff.
struct AnnealedEval {
    double ubar = 0.0;
    double links = 0.0; // F(omega)
};

AnnealedEval annealed_generating(const SIClosedForm& cf, double omega);

/// Near-critical logistic approximation: c' = (beta lambda1 - gamma) c (1-c)
/// with c(0) = 1/2, returning u(t,x) = (beta lambda1 - gamma) c(t) phi1(x) as
/// a Trajectory on t_grid. Subcritical parameters are rejected.
Trajectory near_critical_curve(const Spectrum& s, const EpidemicParams& params,
                               const std::vector<double>& t_grid);

} // namespace gsis
