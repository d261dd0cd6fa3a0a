#include "gsis/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "gsis/errors.hpp"

namespace gsis {

namespace {

void require_supercritical(const char* where, const EpidemicParams& params, double lambda1) {
    if (params.alpha(lambda1) <= 0.0) {
        throw ValidationError(where, "subcritical parameters: beta lambda1 = " +
                                         std::to_string(params.beta * lambda1) +
                                         " <= gamma = " + std::to_string(params.gamma) +
                                         ", no endemic state / no growth");
    }
}

void rhs_into(const KernelSpec& k, const EpidemicParams& params, const Field& u,
              std::vector<double>& out) {
    Field wu = apply_operator(k, u);
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = params.beta * (1.0 - u[i]) * wu[i] - params.gamma * u[i];
    }
}

} // namespace

Field rhs(const KernelSpec& k, const EpidemicParams& params, const Field& u) {
    Field out(partition_of(k), std::vector<double>(u.size(), 0.0));
    require_same_partition(u, out, "dynamics.rhs");
    rhs_into(k, params, u, out.values);
    return out;
}

std::vector<double> uniform_samples(double t_a, double t_b, double dt) {
    if (!(dt > 0.0) || t_b < t_a) {
        throw ValidationError("dynamics.uniform_samples", "need dt > 0 and t_b >= t_a");
    }
    const std::size_t n = static_cast<std::size_t>(std::ceil((t_b - t_a) / dt - 1e-12));
    std::vector<double> ts(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        ts[i] = t_a + (t_b - t_a) * (static_cast<double>(i) / static_cast<double>(n == 0 ? 1 : n));
    }
    ts.back() = t_b;
    return ts;
}

Trajectory integrate(const KernelSpec& k, const EpidemicParams& params, const Field& u0,
                     double t_a, double t_b, const IntegratorConfig& cfg,
                     const std::vector<double>& sample_times, const Spectrum* spectrum) {
    const PartitionPtr& part = partition_of(k);
    {
        Field probe = Field::constant(part, 0.0);
        require_same_partition(u0, probe, "dynamics.integrate");
    }
    if (t_b <= t_a) {
        throw ValidationError("dynamics.integrate", "t_b must exceed t_a");
    }
    for (double v : u0.values) {
        if (v < 0.0 || v > 1.0) {
            throw ValidationError("dynamics.integrate", "u0 must lie in [0,1] per cell");
        }
    }

    Spectrum local;
    if (!spectrum) {
        local = leading_eigenpair(k);
        spectrum = &local;
    }

    Trajectory traj;
    traj.partition = part;
    traj.phi1 = spectrum->phi1;
    traj.times.reserve(sample_times.size());
    traj.states.reserve(sample_times.size());
    traj.derivs.reserve(sample_times.size());

    Field work(part, std::vector<double>(u0.size(), 0.0));
    auto odefun = [&](double, const std::vector<double>& y, std::vector<double>& dydt) {
        work.values = y;
        rhs_into(k, params, work, dydt);
    };
    auto guard = [&](double t, const std::vector<double>& y) {
        for (double v : y) {
            if (v < -Trajectory::tol_state || v > 1.0 + Trajectory::tol_state) {
                throw DomainViolationError(
                    "dynamics.integrate",
                    "state left [0,1] beyond 1e-8 at t = " + std::to_string(t) +
                        " (value " + std::to_string(v) + "); step-size or kernel pathology",
                    t);
            }
        }
    };
    auto sink = [&](double t, const std::vector<double>& y, const std::vector<double>& f) {
        traj.append(t, y, f);
    };

    std::vector<double> y = u0.values;
    traj.stats = integrate_ode(odefun, y, t_a, t_b, cfg, sample_times, sink, guard);
    return traj;
}

LinearFlow::LinearFlow(const KernelSpec& k, const EpidemicParams& params, const Field& u0,
                       std::size_t k_modes) {
    if (k_modes == 0) {
        throw TruncationError("dynamics.linear_solution", "k_modes must be >= 1");
    }
    if (is_rank_one(k)) {
        // One true mode plus the aggregate zero eigenspace: with K = 2 the
        // expansion c1 e^{alpha1 t} phi1 + e^{-gamma t}(u0 - c1 phi1) is the
        // exact linear semigroup of a rank-1 kernel.
        if (k_modes > 2) {
            throw TruncationError("dynamics.linear_solution",
                                  "rank-1 kernels expose 2 modes (phi1 and the aggregate zero "
                                  "eigenspace); requested " +
                                      std::to_string(k_modes));
        }
        Spectrum s = leading_eigenpair(k);
        const double c1 = inner(s.phi1, u0);
        alphas_.push_back(params.alpha(s.lambda1));
        coeffs_.push_back(c1);
        fields_.push_back(s.phi1);
        if (k_modes == 2) {
            Field rem = axpby(1.0, u0, -c1, s.phi1);
            alphas_.push_back(params.alpha(0.0));
            coeffs_.push_back(1.0);
            fields_.push_back(std::move(rem));
        }
    } else {
        EigenDecomposition dec = full_eigendecomposition(k);
        if (k_modes > dec.eigenvalues.size()) {
            throw TruncationError("dynamics.linear_solution",
                                  "kernel exposes " + std::to_string(dec.eigenvalues.size()) +
                                      " modes; requested " + std::to_string(k_modes));
        }
        for (std::size_t i = 0; i < k_modes; ++i) {
            alphas_.push_back(params.alpha(dec.eigenvalues[i]));
            coeffs_.push_back(inner(dec.eigenfields[i], u0));
            fields_.push_back(std::move(dec.eigenfields[i]));
        }
    }
}

Field LinearFlow::at(double t) const {
    Field out(fields_.front().partition,
              std::vector<double>(fields_.front().size(), 0.0));
    for (std::size_t m = 0; m < alphas_.size(); ++m) {
        const double a = coeffs_[m] * std::exp(alphas_[m] * t);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += a * fields_[m][i];
        }
    }
    return out;
}

Field linear_solution(const KernelSpec& k, const EpidemicParams& params, const Field& u0,
                      double t, std::size_t k_modes) {
    return LinearFlow(k, params, u0, k_modes).at(t);
}

EndemicState endemic_solve(const KernelSpec& k, const EpidemicParams& params, double tol,
                           EndemicMethod method) {
    if (tol <= 0.0) {
        throw ValidationError("dynamics.endemic_solve", "tolerance must be positive");
    }
    Spectrum s = leading_eigenpair(k);
    require_supercritical("dynamics.endemic_solve", params, s.lambda1);
    const PartitionPtr& part = partition_of(k);

    auto residual_of = [&](const Field& psi) {
        Field w = apply_operator(k, psi);
        Field r(part, std::vector<double>(psi.size(), 0.0));
        for (std::size_t i = 0; i < psi.size(); ++i) {
            r[i] = params.beta * (1.0 - psi[i]) * w[i] - params.gamma * psi[i];
        }
        return norm_l2(r);
    };

    if (params.gamma == 0.0) {
        // SI: no curing, everyone ends infected.
        EndemicState st;
        st.psi = Field::constant(part, 1.0);
        st.residual = residual_of(st.psi);
        if (is_rank_one(k)) {
            st.c_star = inner(s.phi1, st.psi);
        }
        st.method = "saturated";
        return st;
    }

    const bool rank1 = is_rank_one(k);
    if (method == EndemicMethod::Auto) {
        method = rank1 ? EndemicMethod::Bisection : EndemicMethod::FixedPoint;
    }
    if (method == EndemicMethod::Bisection && !rank1) {
        throw ValidationError("dynamics.endemic_solve",
                              "bisection path requires a rank-1 kernel");
    }

    EndemicState st;
    if (method == EndemicMethod::Bisection) {
        // c* solves g(c) := int phi1^2 / (gamma/(beta lambda1) + c phi1) dx = 1;
        // g is strictly decreasing with g(0) = beta lambda1 / gamma > 1.
        const double ratio = params.gamma / (params.beta * s.lambda1);
        const auto& w = part->weights();
        const Field& phi = s.phi1;
        auto g = [&](double c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < phi.size(); ++i) {
                acc += w[i] * phi[i] * phi[i] / (ratio + c * phi[i]);
            }
            return acc;
        };
        double lo = 0.0, hi = 1.0;
        std::size_t grow = 0;
        while (g(hi) > 1.0) {
            lo = hi;
            hi *= 2.0;
            if (++grow > 200) {
                throw SolverError("dynamics.endemic_solve",
                                  "bisection bracket growth failed (no root below 2^200)");
            }
        }
        std::size_t iters = 0;
        while (hi - lo > 1e-16 * std::max(1.0, hi) && iters < 200) {
            double mid = 0.5 * (lo + hi);
            (g(mid) > 1.0 ? lo : hi) = mid;
            ++iters;
        }
        const double c = 0.5 * (lo + hi);
        std::vector<double> psi(phi.size());
        const double bl = params.beta * s.lambda1;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            psi[i] = bl * c * phi[i] / (params.gamma + bl * c * phi[i]);
        }
        st.psi = Field(part, std::move(psi));
        st.iterations = iters;
        st.method = "bisection";
    } else {
        // Monotone fixed point from the dominating constant 1.
        Field psi = Field::constant(part, 1.0);
        std::size_t it = 0;
        const std::size_t cap = 1000000;
        double res = residual_of(psi);
        while (res > tol && it < cap) {
            Field wpsi = apply_operator(k, psi);
            for (std::size_t i = 0; i < psi.size(); ++i) {
                const double b = params.beta * wpsi[i];
                psi[i] = b / (params.gamma + b);
            }
            res = residual_of(psi);
            ++it;
        }
        if (res > tol) {
            throw IterationError("dynamics.endemic_solve",
                                 "fixed point did not reach tolerance within 1e6 iterations",
                                 res);
        }
        st.psi = std::move(psi);
        st.iterations = it;
        st.method = "fixed_point";
    }
    st.residual = residual_of(st.psi);
    if (rank1) {
        st.c_star = inner(s.phi1, st.psi);
    }
    return st;
}

BoundReport verify_linearization_bounds(const KernelSpec& k, const EpidemicParams& params,
                                        const Field& u0, double eps_prime,
                                        const IntegratorConfig& cfg) {
    Spectrum s = leading_eigenpair(k);
    require_supercritical("dynamics.verify_linearization_bounds", params, s.lambda1);
    const double c1_0 = inner(s.phi1, u0);
    if (c1_0 <= 0.0) {
        throw ValidationError("dynamics.verify_linearization_bounds",
                              "c1(0) must be positive; t_bar undefined");
    }
    const double alpha1 = params.alpha(s.lambda1);
    const double lambda2 = is_rank_one(k) ? 0.0 : second_eigenvalue(k, s);
    const double alpha2 = params.alpha(lambda2);
    const double t_bar = std::log(eps_prime / c1_0) / alpha1;
    if (t_bar <= 0.0) {
        throw ValidationError("dynamics.verify_linearization_bounds",
                              "eps_prime must exceed c1(0)");
    }

    BoundReport rep;
    rep.eps_prime = eps_prime;
    rep.t_bar = t_bar;
    rep.lambda1 = s.lambda1;
    rep.lambda2 = lambda2;
    rep.m = s.min_phi1();

    const double norm_u0 = norm_l2(u0);
    const double ratio = norm_u0 / c1_0;
    rep.ratio_squared = ratio * ratio;

    // Exact linear semigroup: 2 modes for rank-1, full rank otherwise.
    const std::size_t full_modes = is_rank_one(k) ? 2 : partition_of(k)->size();
    LinearFlow v(k, params, u0, full_modes);

    const std::vector<double> ts = uniform_samples(0.0, t_bar, t_bar / 400.0);
    Trajectory u = integrate(k, params, u0, 0.0, t_bar, cfg, ts, &s);
    double sup = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        Field vi = v.at(u.times[i]);
        Field diff(u.partition, u.states[i]);
        for (std::size_t j = 0; j < diff.size(); ++j) {
            diff[j] -= vi[j];
        }
        sup = std::max(sup, norm_l2(diff));
    }
    rep.sup_u_minus_v = sup;
    rep.linear_error_bound =
        (params.beta * s.lambda1 / alpha1) * rep.ratio_squared * eps_prime * eps_prime;
    rep.linear_error_ok = sup <= rep.linear_error_bound;

    Field v_bar = v.at(t_bar);
    Field dev = axpby(1.0 / eps_prime, v_bar, -1.0, s.phi1);
    rep.leading_term_deviation = norm_l2(dev);
    rep.leading_term_bound = ratio * std::exp(-(alpha1 - alpha2) * t_bar);
    rep.leading_term_ok = rep.leading_term_deviation <= rep.leading_term_bound;

    if (const auto* db = std::get_if<DiscreteBlock>(&k)) {
        rep.has_discrete_bound = true;
        const double j_min = db->partition->min_weight();
        rep.discrete_bound = 1.0 / (rep.m * rep.m * j_min);
        rep.discrete_ok = rep.ratio_squared <= rep.discrete_bound;
    }
    return rep;
}

double monotone_theta0(const KernelSpec& k, const EpidemicParams& params) {
    Spectrum s = leading_eigenpair(k);
    require_supercritical("dynamics.monotone_envelope", params, s.lambda1);
    return 0.5 * (1.0 - params.gamma / (params.beta * s.lambda1)) / norm_sup(s.phi1);
}

MonotoneReport monotone_envelope(const KernelSpec& k, const EpidemicParams& params, double theta,
                                 double t_a, double t_b, const IntegratorConfig& cfg) {
    Spectrum s = leading_eigenpair(k);
    require_supercritical("dynamics.monotone_envelope", params, s.lambda1);
    if (theta < 0.0 || theta * norm_sup(s.phi1) > 1.0) {
        throw ValidationError("dynamics.monotone_envelope",
                              "theta phi1 must lie in [0,1] per cell");
    }
    Field u0 = s.phi1;
    for (double& v : u0.values) {
        v *= theta;
    }
    const double alpha1 = params.alpha(s.lambda1);
    const std::vector<double> ts = uniform_samples(t_a, t_b, 0.01 / alpha1);
    MonotoneReport rep;
    rep.theta = theta;
    rep.trajectory = integrate(k, params, u0, t_a, t_b, cfg, ts, &s);
    rep.max_violation = 0.0;
    const auto& st = rep.trajectory.states;
    for (std::size_t i = 1; i < st.size(); ++i) {
        for (std::size_t j = 0; j < st[i].size(); ++j) {
            rep.max_violation = std::max(rep.max_violation, st[i - 1][j] - st[i][j]);
        }
    }
    rep.monotone = rep.max_violation <= Trajectory::tol_state;
    return rep;
}

} // namespace gsis
