#include "gsis/usic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gsis/errors.hpp"

namespace gsis {

namespace {

double min_spacing(const Trajectory& t) {
    double dt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) {
        dt = std::min(dt, t.times[i] - t.times[i - 1]);
    }
    return dt;
}

double sup_l2_until(const Trajectory& t, double t_stop) {
    double sup = 0.0;
    for (std::size_t i = 0; i < t.size() && t.times[i] <= t_stop + 1e-12; ++i) {
        sup = std::max(sup, t.l2[i]);
    }
    // The crossing point itself (linear interpolation of the l2 series).
    sup = std::max(sup, t.l2_at(t_stop));
    return sup;
}

} // namespace

AlignmentReport align(const Trajectory& a, const Trajectory& b, double level, double horizon,
                      CrossingStat stat) {
    if (!(level > 0.0) || !(horizon > 0.0)) {
        throw ValidationError("usic.align", "level and horizon must be positive");
    }
    if (!same_partition(a.partition, b.partition)) {
        throw DimensionError("usic.align", "trajectories live on different partitions");
    }
    const bool use_prev = (stat == CrossingStat::Prevalence);
    const double cross_a = a.crossing_time(level, use_prev);
    const double cross_b = b.crossing_time(level, use_prev);
    const double pad = 1e-9;
    if (cross_a + horizon > a.t_back() + pad || cross_b + horizon > b.t_back() + pad) {
        throw InsufficientHorizonError(
            "usic.align", "trajectory ends before crossing + horizon; integrate further");
    }

    AlignmentReport rep;
    rep.level = level;
    rep.horizon = horizon;
    rep.stat = stat;
    rep.t1 = cross_a - a.t_front();
    rep.t2 = cross_b - b.t_front();

    // Resample both trajectories on a common relative grid via cubic Hermite
    // dense output; the grid inherits the finer of the stored spacings.
    const double dt = std::min(min_spacing(a), min_spacing(b));
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    const auto& w = a.partition->weights();
    std::vector<double> ua, ub;
    double sup = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = horizon * (static_cast<double>(i) / static_cast<double>(n));
        a.state_at(std::min(cross_a + s, a.t_back()), ua);
        b.state_at(std::min(cross_b + s, b.t_back()), ub);
        double acc = 0.0;
        for (std::size_t j = 0; j < ua.size(); ++j) {
            const double d = ua[j] - ub[j];
            acc += w[j] * d * d;
        }
        sup = std::max(sup, std::sqrt(acc));
    }
    rep.sup_distance = sup;
    rep.pre_shift_max = std::max(sup_l2_until(a, cross_a), sup_l2_until(b, cross_b));
    return rep;
}

SweepReport usic_sweep(const KernelSpec& k, const EpidemicParams& params,
                       const std::vector<Field>& family, double level, double horizon,
                       const IntegratorConfig& cfg, CrossingStat stat) {
    if (family.empty()) {
        throw ValidationError("usic.usic_sweep", "empty initial-condition family");
    }
    Spectrum s = leading_eigenpair(k);
    const double alpha1 = params.alpha(s.lambda1);

    SweepReport rep;
    rep.lambda1 = s.lambda1;
    rep.supercritical = alpha1 > 0.0;
    if (!rep.supercritical) {
        throw ValidationError("usic.usic_sweep",
                              "subcritical parameters: curves decay, no alignment level");
    }
    rep.lambda2 = is_rank_one(k) ? 0.0 : second_eigenvalue(k, s);
    rep.gap_condition =
        params.beta * s.lambda1 < params.gamma + 2.0 * params.beta * (s.lambda1 - rep.lambda2);

    // Integrate each member past its crossing plus the horizon. The linear
    // estimate log(level/c1(0))/alpha1 undershoots the true crossing (u <= v),
    // so a generous margin is added; align still errors if it was not enough.
    std::vector<Trajectory>& trajs = rep.trajectories;
    trajs.reserve(family.size());
    for (const Field& u0 : family) {
        const double c1_0 = inner(s.phi1, u0);
        if (c1_0 <= 0.0) {
            throw ValidationError("usic.usic_sweep", "family member with c1(0) <= 0");
        }
        rep.initial_l2.push_back(norm_l2(u0));
        const double t_lin = std::max(0.0, std::log(level / c1_0) / alpha1);
        const double t_end = t_lin + horizon + 5.0 / alpha1;
        const std::vector<double> ts = uniform_samples(0.0, t_end, 0.01 / alpha1);
        trajs.push_back(integrate(k, params, u0, 0.0, t_end, cfg, ts, &s));
    }

    for (std::size_t i = 0; i < trajs.size(); ++i) {
        for (std::size_t j = i + 1; j < trajs.size(); ++j) {
            rep.pair_i.push_back(i);
            rep.pair_j.push_back(j);
            rep.pairs.push_back(align(trajs[i], trajs[j], level, horizon, stat));
            rep.max_sup_distance = std::max(rep.max_sup_distance, rep.pairs.back().sup_distance);
            rep.max_pre_shift = std::max(rep.max_pre_shift, rep.pairs.back().pre_shift_max);
        }
    }

    // delta-restricted trend: for each cutoff (descending), the worst
    // sup_distance among pairs whose members are both below the cutoff.
    std::set<double, std::greater<double>> deltas(rep.initial_l2.begin(), rep.initial_l2.end());
    for (double delta : deltas) {
        double worst = -1.0;
        for (std::size_t p = 0; p < rep.pairs.size(); ++p) {
            if (rep.initial_l2[rep.pair_i[p]] <= delta + 1e-15 &&
                rep.initial_l2[rep.pair_j[p]] <= delta + 1e-15) {
                worst = std::max(worst, rep.pairs[p].sup_distance);
            }
        }
        if (worst >= 0.0) {
            rep.trend.emplace_back(delta, worst);
        }
    }
    return rep;
}

EternalSolution construct_eternal(const KernelSpec& k, const EpidemicParams& params,
                                  double epsilon0, std::size_t n_stages, double t_fwd,
                                  const IntegratorConfig& cfg) {
    if (n_stages == 0) {
        throw ValidationError("usic.construct_eternal", "n_stages must be >= 1");
    }
    Spectrum s = leading_eigenpair(k);
    const double alpha1 = params.alpha(s.lambda1);
    if (alpha1 <= 0.0) {
        throw ValidationError("usic.construct_eternal",
                              "subcritical parameters admit no nontrivial eternal solution");
    }
    if (epsilon0 <= 0.0) {
        epsilon0 = 0.01 * alpha1 / (params.beta * s.lambda1);
    }
    if (epsilon0 >= 1.0) {
        throw ValidationError("usic.construct_eternal", "epsilon0 must be below 1");
    }

    // All stages sample the common grid {m/q : m integer} with 1/q <=
    // 0.01/alpha1, so stage overlaps share sample times exactly and the
    // Cauchy gaps need no interpolation.
    const long q = static_cast<long>(std::ceil(100.0 * alpha1));
    const long m_end = static_cast<long>(std::floor(t_fwd * static_cast<double>(q) + 1e-9));

    EternalSolution sol;
    sol.epsilon0 = epsilon0;

    std::vector<std::vector<double>> prev_states;
    Trajectory traj;
    for (std::size_t n = 1; n <= n_stages; ++n) {
        const double eps_n = epsilon0 * std::exp(-alpha1 * static_cast<double>(n));
        sol.stage_epsilons.push_back(eps_n);
        Field u0 = s.phi1;
        for (double& v : u0.values) {
            v = std::min(eps_n * v, 1.0);
        }
        const long m_start = -static_cast<long>(n) * q;
        std::vector<double> ts;
        ts.reserve(static_cast<std::size_t>(m_end - m_start + 1));
        for (long m = m_start; m <= m_end; ++m) {
            ts.push_back(static_cast<double>(m) / static_cast<double>(q));
        }
        traj = integrate(k, params, u0, ts.front(), ts.back(), cfg, ts, &s);
        sol.stats += traj.stats;

        if (n > 1) {
            // Overlap [-(n-1), t_fwd]: stage n sample j+q aligns with stage
            // n-1 sample j on the shared grid.
            const auto& w = traj.partition->weights();
            double gap = 0.0;
            for (std::size_t j = 0; j < prev_states.size(); ++j) {
                const auto& uo = prev_states[j];
                const auto& un = traj.states[j + static_cast<std::size_t>(q)];
                double acc = 0.0;
                for (std::size_t c = 0; c < uo.size(); ++c) {
                    const double d = un[c] - uo[c];
                    acc += w[c] * d * d;
                }
                gap = std::max(gap, std::sqrt(acc));
            }
            sol.cauchy_gaps.push_back(gap);
        }
        if (n < n_stages) {
            prev_states = std::move(traj.states);
            traj = Trajectory();
        }
    }

    sol.trajectory = std::move(traj);
    sol.alignment_ratio.reserve(sol.trajectory.size());
    for (std::size_t i = 0; i < sol.trajectory.size(); ++i) {
        sol.alignment_ratio.push_back(sol.trajectory.c1[i] / sol.trajectory.l2[i]);
    }
    sol.converged = true;
    for (std::size_t i = 1; i < sol.cauchy_gaps.size(); ++i) {
        if (sol.cauchy_gaps[i] >= sol.cauchy_gaps[i - 1]) {
            sol.converged = false;
        }
    }
    const std::size_t g = sol.cauchy_gaps.size();
    sol.cauchy_rate = 0.0;
    for (std::size_t i = (g >= 3 ? g - 2 : 1); i < g; ++i) {
        sol.cauchy_rate = std::max(sol.cauchy_rate, sol.cauchy_gaps[i] / sol.cauchy_gaps[i - 1]);
    }
    return sol;
}

UniquenessReport uniqueness_check(const KernelSpec& k, const EpidemicParams& params, double eps_a,
                                  double eps_b, std::size_t n_stages, double tol, double horizon,
                                  double t_fwd, const IntegratorConfig& cfg) {
    EternalSolution ea = construct_eternal(k, params, eps_a, n_stages, t_fwd, cfg);
    EternalSolution eb = construct_eternal(k, params, eps_b, n_stages, t_fwd, cfg);
    const double level = std::sqrt(eps_a * eps_b);
    UniquenessReport rep;
    rep.alignment = align(ea.trajectory, eb.trajectory, level, horizon, CrossingStat::C1);
    rep.tol = tol;
    rep.ok = rep.alignment.sup_distance <= tol;
    return rep;
}

} // namespace gsis
