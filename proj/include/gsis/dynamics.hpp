#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gsis/kernel.hpp"
#include "gsis/ode.hpp"
#include "gsis/spectrum.hpp"
#include "gsis/trajectory.hpp"

namespace gsis {

/// SIS vector field beta (1-u) Wu - gamma u per cell; on cell-constant fields
/// of a DiscreteBlock this is exactly the quenched mean-field system.
Field rhs(const KernelSpec& k, const EpidemicParams& params, const Field& u);

/// Integrate the SIS flow from u0 over [t_a, t_b], sampling dense output at
/// sample_times (sorted ascending, inside the span). States are never
/// projected onto [0,1]; a step leaving [-1e-8, 1+1e-8] is retried smaller
/// (the flow points inward there, so an excursion is a step artifact), and
/// DomainViolationError is raised only if no admissible step stays inside.
/// `spectrum` supplies phi1 for the c1 summary; when null it is computed.
Trajectory integrate(const KernelSpec& k, const EpidemicParams& params, const Field& u0,
                     double t_a, double t_b, const IntegratorConfig& cfg,
                     const std::vector<double>& sample_times,
                     const Spectrum* spectrum = nullptr);

/// Uniform sample grid over [t_a, t_b] with spacing <= dt (endpoint included).
std::vector<double> uniform_samples(double t_a, double t_b, double dt);

/// Truncated linearized flow sum_{k<=K} c_k(0) e^{alpha_k t} phi_k with
/// alpha_k = beta lambda_k - gamma. Rank-1 kernels expose two modes: phi1 and,
/// as K = 2, the aggregate zero-eigenspace remainder u0 - c1 phi1 evolving at
/// e^{-gamma t}; K = 2 is then the exact linear semigroup. Matrix kernels use
/// the full eigendecomposition (K up to the cell count, K = n exact).
/// K beyond the available modes -> TruncationError.
Field linear_solution(const KernelSpec& k, const EpidemicParams& params, const Field& u0,
                      double t, std::size_t k_modes);

/// Prepared linear flow for repeated evaluation over many times.
class LinearFlow {
public:
    LinearFlow(const KernelSpec& k, const EpidemicParams& params, const Field& u0,
               std::size_t k_modes);

    Field at(double t) const;
    std::size_t modes() const { return alphas_.size(); }

private:
    std::vector<double> alphas_;
    std::vector<double> coeffs_;
    std::vector<Field> fields_;
};

struct EndemicState {
    Field psi;
    double residual = 0.0; // ||beta (1-psi) W psi - gamma psi||_2
    std::optional<double> c_star; // <phi1, psi>, rank-1 variants only
    std::size_t iterations = 0;
    std::string method; // "bisection", "fixed_point", or "saturated" (gamma = 0)
};

enum class EndemicMethod { Auto, Bisection, FixedPoint };

/// Nonzero solution of beta (1-psi) W psi = gamma psi. Requires beta lambda1 >
/// gamma. Rank-1 kernels solve the scalar equation
///   1 = int phi1^2 / (gamma/(beta lambda1) + c phi1) dx
/// for c* by bisection and set psi = beta lambda1 c phi1 / (gamma + beta
/// lambda1 c phi1); matrix kernels run the monotone fixed point
/// psi <- beta W psi / (gamma + beta W psi) from the constant 1. gamma = 0
/// saturates to psi = 1.
EndemicState endemic_solve(const KernelSpec& k, const EpidemicParams& params, double tol = 1e-12,
                           EndemicMethod method = EndemicMethod::Auto);

/// Linearization-error audit at level eps_prime: integrates u, evaluates the
/// exact linear flow v with v(0) = u0 up to t_bar = log(eps'/c1(0))/alpha1,
/// and reports the measured quantities next to their theoretical bounds
///   sup ||u - v||_2            vs  (beta lambda1/alpha1)(||u0||/c1(0))^2 eps'^2
///   ||v(t_bar)/eps' - phi1||_2 vs  (||u0||/c1(0)) e^{-(alpha1-alpha2) t_bar}
/// plus, for DiscreteBlock kernels, (||u0||/c1(0))^2 vs 1/(m^2 J).
struct BoundReport {
    double eps_prime = 0.0;
    double t_bar = 0.0;
    double sup_u_minus_v = 0.0;
    double linear_error_bound = 0.0;
    bool linear_error_ok = false;
    double leading_term_deviation = 0.0;
    double leading_term_bound = 0.0;
    bool leading_term_ok = false;
    bool has_discrete_bound = false;
    double ratio_squared = 0.0;   // (||u0||_2 / c1(0))^2
    double discrete_bound = 0.0;  // 1/(m^2 J)
    bool discrete_ok = false;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double m = 0.0; // min phi1
};

BoundReport verify_linearization_bounds(const KernelSpec& k, const EpidemicParams& params,
                                        const Field& u0, double eps_prime,
                                        const IntegratorConfig& cfg = {});

/// Integrates from theta phi1 and checks per-cell monotone non-decrease at
/// the samples. A violation beyond tol_state is reported, not thrown.
struct MonotoneReport {
    Trajectory trajectory;
    bool monotone = false;
    double max_violation = 0.0;
    double theta = 0.0;
};

/// Default theta cap 0.5 (1 - gamma/(beta lambda1)) / ||phi1||_inf.
double monotone_theta0(const KernelSpec& k, const EpidemicParams& params);

MonotoneReport monotone_envelope(const KernelSpec& k, const EpidemicParams& params, double theta,
                                 double t_a, double t_b, const IntegratorConfig& cfg = {});

} // namespace gsis
