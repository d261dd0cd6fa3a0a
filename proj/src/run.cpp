#include "gsis/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "gsis/dynamics.hpp"
#include "gsis/errors.hpp"
#include "gsis/io.hpp"
#include "gsis/si_closed_form.hpp"
#include "gsis/spectrum.hpp"
#include "gsis/usic.hpp"
#include "gsis/version.hpp"

namespace gsis {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Field build_u0(const KernelSpec& k, const ExperimentOptions& o, const Spectrum& s) {
    if (o.u0_mode == "eigen") {
        Field u0 = s.phi1;
        for (double& v : u0.values) {
            v = std::min(o.u0_value * v, 1.0);
        }
        return u0;
    }
    return Field::constant(partition_of(k), o.u0_value);
}

json alignment_json(const AlignmentReport& a) {
    return json{{"t1", a.t1},
                {"t2", a.t2},
                {"sup_distance", a.sup_distance},
                {"pre_shift_max", a.pre_shift_max},
                {"level", a.level},
                {"horizon", a.horizon},
                {"stat", a.stat == CrossingStat::Prevalence ? "prevalence" : "c1"}};
}

/// min over stored samples and cells of (Wu)(t, x): the measured uniform
/// lower bound on the force of infection.
double min_operator_value(const KernelSpec& k, const Trajectory& traj) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Field wu = apply_operator(k, traj.state_field(i));
        lo = std::min(lo, min_value(wu));
    }
    return lo;
}

} // namespace

std::string resolve_output_dir(const ExperimentConfig& cfg) {
    if (!cfg.output_dir.empty()) {
        return cfg.output_dir;
    }
    if (const char* env = std::getenv("GRAPHON_SIS_OUTPUT_ROOT"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

int run(const ExperimentConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const fs::path dir = resolve_output_dir(cfg);
    fs::create_directories(dir);

    const Spectrum s = leading_eigenpair(cfg.kernel);
    json constants;
    constants["lambda1"] = s.lambda1;
    constants["min_phi1"] = s.min_phi1();

    IntegratorStats stats;
    int exit_code = 0;

    switch (cfg.experiment) {
    case Experiment::Spectrum: {
        const double l2 = second_eigenvalue(cfg.kernel, s);
        constants["lambda2"] = l2;
        constants["spectral_gap"] = s.lambda1 - l2;
        constants["residual"] = s.residual;
        constants["power_iterations"] = s.iterations;
        write_field_csv(s.phi1, "phi1", (dir / "eigenfunction.csv").string());
        break;
    }

    case Experiment::Endemic: {
        const EndemicMethod method = cfg.options.endemic_method == "bisection"
                                         ? EndemicMethod::Bisection
                                     : cfg.options.endemic_method == "fixed_point"
                                         ? EndemicMethod::FixedPoint
                                         : EndemicMethod::Auto;
        const EndemicState st = endemic_solve(cfg.kernel, cfg.params, cfg.options.endemic_tol,
                                              method);
        write_field_csv(st.psi, "psi", (dir / "endemic.csv").string());
        constants["endemic_residual"] = st.residual;
        constants["endemic_method"] = st.method;
        constants["endemic_iterations"] = st.iterations;
        if (st.c_star) {
            constants["c_star"] = *st.c_star;
        }
        break;
    }

    case Experiment::Simulate: {
        const Field u0 = build_u0(cfg.kernel, cfg.options, s);
        const auto ts = uniform_samples(0.0, cfg.options.t_end, cfg.options.sample_dt);
        const Trajectory traj =
            integrate(cfg.kernel, cfg.params, u0, 0.0, cfg.options.t_end, cfg.integrator, ts, &s);
        stats += traj.stats;
        write_trajectory_csv(traj, (dir / "trajectory.csv").string());
        if (cfg.options.wide) {
            write_trajectory_wide_csv(traj, (dir / "trajectory_wide.csv").string());
        }
        constants["eps0_tilde"] = min_operator_value(cfg.kernel, traj);
        break;
    }

    case Experiment::UsicAlign: {
        std::vector<Field> family;
        family.reserve(cfg.options.levels.size());
        for (double v : cfg.options.levels) {
            family.push_back(Field::constant(partition_of(cfg.kernel), v));
        }
        const CrossingStat stat = cfg.options.crossing == "prevalence" ? CrossingStat::Prevalence
                                                                       : CrossingStat::C1;
        const SweepReport rep = usic_sweep(cfg.kernel, cfg.params, family,
                                           cfg.options.align_level, cfg.options.horizon,
                                           cfg.integrator, stat);
        json pairs = json::array();
        for (std::size_t p = 0; p < rep.pairs.size(); ++p) {
            json item = alignment_json(rep.pairs[p]);
            item["i"] = rep.pair_i[p];
            item["j"] = rep.pair_j[p];
            pairs.push_back(std::move(item));
        }
        json trend = json::array();
        for (const auto& [delta, worst] : rep.trend) {
            trend.push_back(json::array({delta, worst}));
        }
        const json report{{"level", cfg.options.align_level},
                          {"horizon", cfg.options.horizon},
                          {"initial_l2", rep.initial_l2},
                          {"pairs", pairs},
                          {"max_sup_distance", rep.max_sup_distance},
                          {"max_pre_shift", rep.max_pre_shift},
                          {"trend", trend},
                          {"gap_condition", rep.gap_condition},
                          {"lambda1", rep.lambda1},
                          {"lambda2", rep.lambda2}};
        for (std::size_t i = 0; i < rep.trajectories.size(); ++i) {
            stats += rep.trajectories[i].stats;
            write_trajectory_csv(rep.trajectories[i],
                                 (dir / ("trajectory_" + std::to_string(i) + ".csv")).string());
        }
        write_text_file((dir / "alignment.json").string(), report.dump(2) + "\n");
        constants["lambda2"] = rep.lambda2;
        constants["spectral_gap"] = rep.lambda1 - rep.lambda2;
        break;
    }

    case Experiment::Eternal: {
        const EternalSolution sol = construct_eternal(cfg.kernel, cfg.params,
                                                      cfg.options.epsilon0, cfg.options.n_stages,
                                                      cfg.options.t_fwd, cfg.integrator);
        stats += sol.stats;
        write_trajectory_csv(sol.trajectory, (dir / "trajectory.csv").string());
        if (cfg.options.wide) {
            write_trajectory_wide_csv(sol.trajectory, (dir / "trajectory_wide.csv").string());
        }
        double quartile_min = 1.0;
        const std::size_t q = std::max<std::size_t>(1, sol.alignment_ratio.size() / 4);
        for (std::size_t i = 0; i < q; ++i) {
            quartile_min = std::min(quartile_min, sol.alignment_ratio[i]);
        }
        const json report{{"epsilon0", sol.epsilon0},
                          {"stage_epsilons", sol.stage_epsilons},
                          {"cauchy_gaps", sol.cauchy_gaps},
                          {"cauchy_rate", sol.cauchy_rate},
                          {"converged", sol.converged},
                          {"alignment_ratio_min_first_quartile", quartile_min},
                          {"earliest_prevalence", sol.trajectory.prevalence.front()}};
        write_text_file((dir / "eternal.json").string(), report.dump(2) + "\n");
        if (!sol.converged) {
            exit_code = 1;
        }
        break;
    }

    case Experiment::SiExact: {
        const SIClosedForm cf = make_si_closed_form(cfg.kernel, cfg.params);
        if (cfg.options.t_min >= cfg.options.t_end) {
            throw ValidationError("run.si_exact", "t_min must be below t_end");
        }
        const auto ts =
            uniform_samples(cfg.options.t_min, cfg.options.t_end, cfg.options.sample_dt);
        const OmegaCurve curve = omega_solve(cf, ts, cfg.integrator);
        write_omega_csv(curve, (dir / "omega.csv").string());

        const Trajectory traj = closed_form_trajectory(cf, curve);
        write_trajectory_csv(traj, (dir / "trajectory.csv").string());
        constants["omega0"] = cf.omega0;
        constants["phi1_bar"] = cf.phi1_bar;
        if (curve.underflow) {
            constants["omega_underflow_t"] = curve.underflow_t;
            exit_code = 1;
        }
        break;
    }

    case Experiment::ChiCurve: {
        const SIClosedForm cf = make_si_closed_form(cfg.kernel, cfg.params);
        const ChiCurve curve = chi_curve(cf, cfg.options.n_samples);
        write_chi_csv(curve, (dir / "chi.csv").string());
        constants["omega0"] = cf.omega0;
        constants["phi1_bar"] = cf.phi1_bar;
        break;
    }

    case Experiment::VerifyBounds: {
        const Field u0 = build_u0(cfg.kernel, cfg.options, s);
        const BoundReport b = verify_linearization_bounds(cfg.kernel, cfg.params, u0,
                                                          cfg.options.eps_prime, cfg.integrator);
        const json report{{"eps_prime", b.eps_prime},
                          {"t_bar", b.t_bar},
                          {"sup_u_minus_v", b.sup_u_minus_v},
                          {"linear_error_bound", b.linear_error_bound},
                          {"linear_error_ok", b.linear_error_ok},
                          {"leading_term_deviation", b.leading_term_deviation},
                          {"leading_term_bound", b.leading_term_bound},
                          {"leading_term_ok", b.leading_term_ok},
                          {"has_discrete_bound", b.has_discrete_bound},
                          {"ratio_squared", b.ratio_squared},
                          {"discrete_bound", b.discrete_bound},
                          {"discrete_ok", b.discrete_ok},
                          {"lambda1", b.lambda1},
                          {"lambda2", b.lambda2},
                          {"m", b.m}};
        write_text_file((dir / "bounds.json").string(), report.dump(2) + "\n");
        constants["lambda2"] = b.lambda2;
        constants["spectral_gap"] = b.lambda1 - b.lambda2;
        if (!b.linear_error_ok || !b.leading_term_ok ||
            (b.has_discrete_bound && !b.discrete_ok)) {
            exit_code = 1;
        }
        break;
    }
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    json manifest;
    manifest["config"] = json::parse(cfg.echo.empty() ? std::string("{}") : cfg.echo);
    manifest["version"] = kVersion;
    manifest["wall_clock_seconds"] = wall;
    manifest["integrator"] = json{{"steps", stats.steps},
                                  {"rejected", stats.rejected},
                                  {"rhs_evals", stats.rhs_evals}};
    manifest["constants"] = constants;
    write_text_file_atomic((dir / "manifest.json").string(), manifest.dump(2) + "\n");
    return exit_code;
}

} // namespace gsis
