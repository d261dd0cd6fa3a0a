#include "gsis/si_closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsis/errors.hpp"

namespace gsis {

namespace {

void require_nonnegative_omega(double omega, const char* where) {
    if (omega < 0.0) {
        throw ValidationError(where, "omega must be nonnegative (got " + std::to_string(omega) +
                                         "); the closed form is parameterized on omega >= 0");
    }
}

// Doubles hi from 1 until pred(hi) holds; false when the cap is reached.
template <typename Pred>
bool grow_bracket(double& hi, const Pred& pred, int cap) {
    hi = 1.0;
    for (int i = 0; i < cap; ++i) {
        if (pred(hi)) {
            return true;
        }
        hi *= 2.0;
    }
    return pred(hi);
}

// Inverts the strictly increasing Ubar at level; bracket must satisfy
// Ubar(lo) < level <= Ubar(hi).
double invert_ubar(const SIClosedForm& cf, double level, double lo, double hi) {
    for (int i = 0; i < 200 && (hi - lo) > 1e-16 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (Ubar(cf, mid) < level ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

SIClosedForm make_si_closed_form(const KernelSpec& k, const EpidemicParams& params) {
    if (params.gamma != 0.0) {
        throw ValidationError("si.make", "closed form covers the SI case only (gamma = 0)");
    }
    Spectrum s = leading_eigenpair(k);
    if (std::abs(params.beta * s.lambda1 - 1.0) > 1e-9) {
        throw ValidationError("si.make",
                              "beta*lambda1 = " + std::to_string(params.beta * s.lambda1) +
                                  "; rescale time so that beta*lambda1 = 1");
    }
    if (!is_rank_one(k)) {
        const double l2 = second_eigenvalue(k, s);
        if (std::abs(l2) > 1e-8 * s.lambda1) {
            throw ValidationError("si.make", "kernel is not rank one (|lambda2|/lambda1 = " +
                                                 std::to_string(std::abs(l2) / s.lambda1) + ")");
        }
    }

    SIClosedForm cf;
    cf.phi1 = s.phi1;
    cf.lambda1 = s.lambda1;
    cf.beta = params.beta;
    cf.phi1_bar = integral(s.phi1);
    if (const auto* db = std::get_if<DiscreteBlock>(&k)) {
        if (db->annealed && db->annealed->uncorrelated) {
            cf.annealed = db->annealed;
        }
    }

    // Anchor: Ubar(omega0) = 1/2. Ubar is strictly increasing with
    // sup = mass{phi1 > 0}, so the bracket grows until the level is covered.
    double hi = 1.0;
    if (!grow_bracket(hi, [&](double w) { return Ubar(cf, w) >= 0.5; }, 200)) {
        throw SolverError("si.make", "prevalence 1/2 is unreachable: the leading eigenfunction "
                                     "vanishes on too much of the domain");
    }
    cf.omega0 = invert_ubar(cf, 0.5, 0.0, hi);
    return cf;
}

double F_eval(const SIClosedForm& cf, double omega) {
    require_nonnegative_omega(omega, "si.F_eval");
    const auto& w = cf.phi1.partition->weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < cf.phi1.size(); ++i) {
        acc += w[i] * cf.phi1[i] * (-std::expm1(-omega * cf.phi1[i]));
    }
    return acc;
}

double Ubar(const SIClosedForm& cf, double omega) {
    require_nonnegative_omega(omega, "si.Ubar");
    const auto& w = cf.phi1.partition->weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < cf.phi1.size(); ++i) {
        acc += w[i] * (-std::expm1(-omega * cf.phi1[i]));
    }
    return acc;
}

OmegaCurve omega_solve(const SIClosedForm& cf, const std::vector<double>& t_grid,
                       const IntegratorConfig& cfg) {
    if (t_grid.empty()) {
        throw ValidationError("si.omega_solve", "empty time grid");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (t_grid[i] <= t_grid[i - 1]) {
            throw ValidationError("si.omega_solve", "time grid must be strictly increasing");
        }
    }

    // F(omega) vanishes at 0, so clamping at 0 freezes an underflowed state
    // instead of feeding the negative-omega domain error back into the rhs.
    const RhsFn rhs = [&cf](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = F_eval(cf, std::max(y[0], 0.0));
    };

    OmegaCurve curve;
    curve.t = t_grid;
    curve.omega.assign(t_grid.size(), 0.0);

    const std::size_t n_back =
        static_cast<std::size_t>(std::lower_bound(t_grid.begin(), t_grid.end(), 0.0) -
                                 t_grid.begin());
    if (n_back > 0) {
        std::vector<double> ts(t_grid.begin(), t_grid.begin() + n_back);
        std::reverse(ts.begin(), ts.end());
        std::vector<double> y{cf.omega0};
        std::size_t slot = n_back;
        integrate_ode(
            rhs, y, 0.0, ts.back(), cfg, ts,
            [&](double, const std::vector<double>& ys, const std::vector<double>&) {
                curve.omega[--slot] = ys[0];
            });
    }
    if (n_back < t_grid.size()) {
        std::vector<double> ts(t_grid.begin() + n_back, t_grid.end());
        std::vector<double> y{cf.omega0};
        std::size_t slot = n_back;
        if (ts.back() > 0.0) {
            integrate_ode(rhs, y, 0.0, ts.back(), cfg, ts,
                          [&](double, const std::vector<double>& ys, const std::vector<double>&) {
                              curve.omega[slot++] = ys[0];
                          });
        } else {
            // Grid ends exactly at the anchor.
            curve.omega[slot] = cf.omega0;
        }
    }

    curve.prevalence.resize(curve.omega.size());
    for (std::size_t i = 0; i < curve.omega.size(); ++i) {
        if (curve.omega[i] <= 0.0 && curve.t[i] < 0.0) {
            curve.underflow = true;
            curve.underflow_t = std::max(curve.underflow_t, curve.t[i]);
        }
        curve.omega[i] = std::max(curve.omega[i], 0.0);
        curve.prevalence[i] = Ubar(cf, curve.omega[i]);
    }
    return curve;
}

Field si_state(const SIClosedForm& cf, double t, const IntegratorConfig& cfg) {
    if (t == 0.0) {
        return si_state_at(cf, cf.omega0);
    }
    OmegaCurve curve = omega_solve(cf, {t}, cfg);
    return si_state_at(cf, curve.omega.front());
}

Field si_state_at(const SIClosedForm& cf, double omega) {
    require_nonnegative_omega(omega, "si.si_state");
    Field u(cf.phi1.partition, std::vector<double>(cf.phi1.size(), 0.0));
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = -std::expm1(-omega * cf.phi1[i]);
    }
    return u;
}

Trajectory closed_form_trajectory(const SIClosedForm& cf, const OmegaCurve& curve) {
    Trajectory traj;
    traj.partition = cf.phi1.partition;
    traj.phi1 = cf.phi1;
    std::vector<double> u(cf.phi1.size()), du(cf.phi1.size());
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        const double f = F_eval(cf, curve.omega[i]);
        for (std::size_t j = 0; j < u.size(); ++j) {
            const double e = std::exp(-curve.omega[i] * cf.phi1[j]);
            u[j] = 1.0 - e;
            du[j] = f * cf.phi1[j] * e;
        }
        traj.append(curve.t[i], u, du);
    }
    return traj;
}

ChiCurve chi_curve(const SIClosedForm& cf, std::size_t n_samples) {
    if (n_samples < 2) {
        throw ValidationError("si.chi_curve", "need at least two samples");
    }
    // omega_max: grown until the prevalence is numerically saturated. When
    // phi1 vanishes on part of the domain, Ubar tops out below 1 - 1e-6 and
    // the cap leaves omega_max at the saturation plateau, which is still a
    // valid parametric endpoint.
    double omega_max = 1.0;
    grow_bracket(omega_max, [&](double w) { return Ubar(cf, w) > 1.0 - 1e-6; }, 600);

    ChiCurve curve;
    curve.phi1_bar = cf.phi1_bar;
    curve.prevalence.reserve(n_samples);
    curve.si_links.reserve(n_samples);
    const double lo = std::log(1e-6), hi = std::log(omega_max);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const double omega = std::exp(lo + s * (hi - lo));
        const double f = F_eval(cf, omega);
        curve.prevalence.push_back(Ubar(cf, omega));
        curve.si_links.push_back(f * (cf.phi1_bar - f));
    }
    return curve;
}

double chi_at(const SIClosedForm& cf, double ubar) {
    if (ubar <= 0.0) {
        throw ValidationError("si.chi_at", "prevalence must be positive");
    }
    if (ubar >= 1.0) {
        throw SaturationError("si.chi_at", "prevalence " + std::to_string(ubar) +
                                               " is at or beyond full infection");
    }
    double hi = 1.0;
    if (!grow_bracket(hi, [&](double w) { return Ubar(cf, w) >= ubar; }, 1000)) {
        throw SaturationError("si.chi_at",
                              "prevalence " + std::to_string(ubar) +
                                  " exceeds the supremum of the closed-form prevalence");
    }
    const double omega = invert_ubar(cf, ubar, 0.0, hi);
    const double f = F_eval(cf, omega);
    return f * (cf.phi1_bar - f);
}

AnnealedEval annealed_generating(const SIClosedForm& cf, double omega) {
    require_nonnegative_omega(omega, "si.annealed_generating");
    if (!cf.annealed || !cf.annealed->uncorrelated) {
        throw ValidationError("si.annealed_generating",
                              "kernel was not built as an uncorrelated annealed network");
    }
    const auto& kdeg = cf.annealed->degrees;
    const auto& pk = cf.annealed->pk;
    double k1 = 0.0, k2 = 0.0;
    for (std::size_t i = 0; i < kdeg.size(); ++i) {
        k1 += pk[i] * kdeg[i];
        k2 += pk[i] * kdeg[i] * kdeg[i];
    }
    const double sq = std::sqrt(k2);
    double g = 0.0, gp = 0.0;
    for (std::size_t i = 0; i < kdeg.size(); ++i) {
        const double e = std::exp(-omega * kdeg[i] / sq);
        g += pk[i] * e;
        gp += pk[i] * kdeg[i] * e;
    }
    AnnealedEval out;
    out.ubar = 1.0 - g;
    // The inner derivative of G(-omega/sqrt(<k^2>)) carries a 1/sqrt(<k^2>)
    // factor, so F = (<k> - G'(-omega/sqrt(<k^2>))) / sqrt(<k^2>); this is the
    // same sum as the quadrature F and vanishes at omega = 0.
    out.links = (k1 - gp) / sq;
    return out;
}

Trajectory near_critical_curve(const Spectrum& s, const EpidemicParams& params,
                               const std::vector<double>& t_grid) {
    const double alpha1 = params.alpha(s.lambda1);
    if (alpha1 <= 0.0) {
        throw ValidationError("si.near_critical",
                              "subcritical parameters: the logistic amplitude decays");
    }
    if (t_grid.empty()) {
        throw ValidationError("si.near_critical", "empty time grid");
    }
    Trajectory traj;
    traj.partition = s.phi1.partition;
    traj.phi1 = s.phi1;
    std::vector<double> u(s.phi1.size()), du(s.phi1.size());
    for (double t : t_grid) {
        const double c = 1.0 / (1.0 + std::exp(-alpha1 * t));
        const double dc = alpha1 * c * (1.0 - c);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = alpha1 * c * s.phi1[i];
            du[i] = alpha1 * dc * s.phi1[i];
        }
        traj.append(t, u, du);
    }
    return traj;
}

} // namespace gsis
