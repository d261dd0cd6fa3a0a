#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gsis/kernel.hpp"
#include "gsis/ode.hpp"

namespace gsis {

enum class Experiment {
    Spectrum,
    Endemic,
    Simulate,
    UsicAlign,
    Eternal,
    SiExact,
    ChiCurve,
    VerifyBounds,
};

const char* experiment_name(Experiment e);
std::optional<Experiment> experiment_from_name(const std::string& name);

/// Flat option bag; each experiment reads its own subset, defaults below.
struct ExperimentOptions {
    // simulate / verify-bounds initial condition
    std::string u0_mode = "uniform"; // "uniform" (constant) | "eigen" (value*phi1 capped at 1)
    double u0_value = 1e-3;
    // simulate / si-exact time window
    double t_end = 20.0;
    double sample_dt = 0.1;
    double t_min = -10.0; // si-exact only (backward reach of the omega curve)
    bool wide = false;    // also emit the one-column-per-cell trajectory CSV
    // usic-align
    std::vector<double> levels; // family of uniform initial prevalences
    double align_level = 1e-2;
    double horizon = 10.0;
    std::string crossing = "c1"; // "c1" | "prevalence"
    // eternal
    double epsilon0 = 0.0; // <= 0 selects the construction default
    std::size_t n_stages = 8;
    double t_fwd = 15.0;
    // chi-curve
    std::size_t n_samples = 200;
    // verify-bounds
    double eps_prime = 1e-2;
    // endemic
    std::string endemic_method = "auto"; // "auto" | "bisection" | "fixed_point"
    double endemic_tol = 1e-12;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::Simulate;
    KernelSpec kernel;
    EpidemicParams params;
    IntegratorConfig integrator;
    ExperimentOptions options;
    std::string output_dir; // empty -> GRAPHON_SIS_OUTPUT_ROOT env var, then cwd
    std::string echo;       // canonical JSON of the accepted input, for the manifest
};

/// parse_config outcome: `config` is engaged iff `errors` is empty. All
/// validation problems are collected, not just the first.
struct ParsedConfig {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

/// Parses and validates structured config text (JSON). Unknown keys are
/// rejected at every level; kernel file references are resolved against
/// base_dir and must exist at parse time.
ParsedConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Applies dot-path overrides ("options.horizon=12", "params.beta=2") to
/// config text before parsing; values that parse as JSON are typed, anything
/// else becomes a string. Intermediate objects are created as needed.
std::string apply_config_overrides(const std::string& text,
                                   const std::vector<std::string>& overrides);

} // namespace gsis
