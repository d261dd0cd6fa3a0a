#include "gsis/config.hpp"

#include <filesystem>
#include <initializer_list>

#include <json.hpp>

#include "gsis/errors.hpp"
#include "gsis/io.hpp"

namespace gsis {

using nlohmann::json;

const char* experiment_name(Experiment e) {
    switch (e) {
    case Experiment::Spectrum: return "spectrum";
    case Experiment::Endemic: return "endemic";
    case Experiment::Simulate: return "simulate";
    case Experiment::UsicAlign: return "usic-align";
    case Experiment::Eternal: return "eternal";
    case Experiment::SiExact: return "si-exact";
    case Experiment::ChiCurve: return "chi-curve";
    case Experiment::VerifyBounds: return "verify-bounds";
    }
    return "?";
}

std::optional<Experiment> experiment_from_name(const std::string& name) {
    for (Experiment e : {Experiment::Spectrum, Experiment::Endemic, Experiment::Simulate,
                         Experiment::UsicAlign, Experiment::Eternal, Experiment::SiExact,
                         Experiment::ChiCurve, Experiment::VerifyBounds}) {
        if (name == experiment_name(e)) {
            return e;
        }
    }
    return std::nullopt;
}

namespace {

/// Collects every problem instead of stopping at the first.
struct Collector {
    std::vector<std::string>& errors;

    void add(const std::string& path, const std::string& what) {
        errors.push_back(path + ": " + what);
    }

    void check_keys(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (const auto& item : j.items()) {
            bool known = false;
            for (const char* key : allowed) {
                if (item.key() == key) {
                    known = true;
                    break;
                }
            }
            if (!known) {
                add(path, "unknown key \"" + item.key() + "\"");
            }
        }
    }

    /// Reads j[key] into out when present and of the right type; reports a
    /// type mismatch otherwise. Returns whether out was written.
    bool real(const json& j, const char* key, const std::string& path, double& out) {
        if (!j.contains(key)) {
            return false;
        }
        if (!j[key].is_number()) {
            add(path + "." + key, "must be a number");
            return false;
        }
        out = j[key].get<double>();
        return true;
    }

    bool natural(const json& j, const char* key, const std::string& path, std::size_t& out) {
        if (!j.contains(key)) {
            return false;
        }
        if (!j[key].is_number_unsigned()) {
            add(path + "." + key, "must be a non-negative integer");
            return false;
        }
        out = j[key].get<std::size_t>();
        return true;
    }

    bool text(const json& j, const char* key, const std::string& path, std::string& out) {
        if (!j.contains(key)) {
            return false;
        }
        if (!j[key].is_string()) {
            add(path + "." + key, "must be a string");
            return false;
        }
        out = j[key].get<std::string>();
        return true;
    }

    bool flag(const json& j, const char* key, const std::string& path, bool& out) {
        if (!j.contains(key)) {
            return false;
        }
        if (!j[key].is_boolean()) {
            add(path + "." + key, "must be a boolean");
            return false;
        }
        out = j[key].get<bool>();
        return true;
    }

    bool real_array(const json& j, const char* key, const std::string& path,
                    std::vector<double>& out) {
        if (!j.contains(key)) {
            return false;
        }
        if (!j[key].is_array()) {
            add(path + "." + key, "must be an array of numbers");
            return false;
        }
        std::vector<double> vals;
        for (const auto& v : j[key]) {
            if (!v.is_number()) {
                add(path + "." + key, "must contain numbers only");
                return false;
            }
            vals.push_back(v.get<double>());
        }
        out = std::move(vals);
        return true;
    }
};

void parse_options(const json& j, Collector& c, ExperimentOptions& o) {
    c.check_keys(j, "options",
                 {"u0_mode", "u0_value", "t_end", "sample_dt", "t_min", "wide", "levels",
                  "align_level", "horizon", "crossing", "epsilon0", "n_stages", "t_fwd",
                  "n_samples", "eps_prime", "endemic_method", "endemic_tol"});
    if (c.text(j, "u0_mode", "options", o.u0_mode) && o.u0_mode != "uniform" &&
        o.u0_mode != "eigen") {
        c.add("options.u0_mode", "must be \"uniform\" or \"eigen\"");
    }
    if (c.real(j, "u0_value", "options", o.u0_value) && !(o.u0_value > 0.0 && o.u0_value <= 1.0)) {
        c.add("options.u0_value", "must lie in (0, 1]");
    }
    if (c.real(j, "t_end", "options", o.t_end) && !(o.t_end > 0.0)) {
        c.add("options.t_end", "must be positive");
    }
    if (c.real(j, "sample_dt", "options", o.sample_dt) && !(o.sample_dt > 0.0)) {
        c.add("options.sample_dt", "must be positive");
    }
    c.real(j, "t_min", "options", o.t_min);
    c.flag(j, "wide", "options", o.wide);
    if (c.real_array(j, "levels", "options", o.levels)) {
        for (double v : o.levels) {
            if (!(v > 0.0 && v < 1.0)) {
                c.add("options.levels", "entries must lie in (0, 1)");
                break;
            }
        }
    }
    if (c.real(j, "align_level", "options", o.align_level) && !(o.align_level > 0.0)) {
        c.add("options.align_level", "must be positive");
    }
    if (c.real(j, "horizon", "options", o.horizon) && !(o.horizon > 0.0)) {
        c.add("options.horizon", "must be positive");
    }
    if (c.text(j, "crossing", "options", o.crossing) && o.crossing != "c1" &&
        o.crossing != "prevalence") {
        c.add("options.crossing", "must be \"c1\" or \"prevalence\"");
    }
    c.real(j, "epsilon0", "options", o.epsilon0);
    if (c.natural(j, "n_stages", "options", o.n_stages) && o.n_stages == 0) {
        c.add("options.n_stages", "must be at least 1");
    }
    if (c.real(j, "t_fwd", "options", o.t_fwd) && !(o.t_fwd > 0.0)) {
        c.add("options.t_fwd", "must be positive");
    }
    if (c.natural(j, "n_samples", "options", o.n_samples) && o.n_samples < 2) {
        c.add("options.n_samples", "must be at least 2");
    }
    if (c.real(j, "eps_prime", "options", o.eps_prime) && !(o.eps_prime > 0.0)) {
        c.add("options.eps_prime", "must be positive");
    }
    if (c.text(j, "endemic_method", "options", o.endemic_method) && o.endemic_method != "auto" &&
        o.endemic_method != "bisection" && o.endemic_method != "fixed_point") {
        c.add("options.endemic_method", "must be \"auto\", \"bisection\" or \"fixed_point\"");
    }
    if (c.real(j, "endemic_tol", "options", o.endemic_tol) && !(o.endemic_tol > 0.0)) {
        c.add("options.endemic_tol", "must be positive");
    }
}

void parse_integrator(const json& j, Collector& c, IntegratorConfig& cfg) {
    c.check_keys(j, "integrator", {"rel_tol", "abs_tol", "max_step", "fixed_step", "method"});
    if (c.real(j, "rel_tol", "integrator", cfg.rel_tol) && !(cfg.rel_tol > 0.0)) {
        c.add("integrator.rel_tol", "must be positive");
    }
    if (c.real(j, "abs_tol", "integrator", cfg.abs_tol) && !(cfg.abs_tol > 0.0)) {
        c.add("integrator.abs_tol", "must be positive");
    }
    if (c.real(j, "max_step", "integrator", cfg.max_step) && cfg.max_step < 0.0) {
        c.add("integrator.max_step", "must be non-negative (0 = unlimited)");
    }
    if (c.real(j, "fixed_step", "integrator", cfg.fixed_step) && cfg.fixed_step < 0.0) {
        c.add("integrator.fixed_step", "must be non-negative (0 = adaptive)");
    }
    if (c.text(j, "method", "integrator", cfg.method) && cfg.method != "dopri5") {
        c.add("integrator.method", "unknown method \"" + cfg.method + "\"");
    }
}

} // namespace

ParsedConfig parse_config(const std::string& text, const std::string& base_dir) {
    ParsedConfig out;
    Collector c{out.errors};

    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        c.add("config", std::string("malformed JSON: ") + e.what());
        return out;
    }
    if (!j.is_object()) {
        c.add("config", "top level must be an object");
        return out;
    }
    c.check_keys(j, "config",
                 {"experiment", "kernel", "params", "integrator", "options", "output_dir"});

    ExperimentConfig cfg;

    std::string tag;
    if (!c.text(j, "experiment", "config", tag)) {
        if (!j.contains("experiment")) {
            c.add("config.experiment", "missing (one of spectrum, endemic, simulate, usic-align, "
                                       "eternal, si-exact, chi-curve, verify-bounds)");
        }
    } else if (auto e = experiment_from_name(tag)) {
        cfg.experiment = *e;
    } else {
        c.add("config.experiment", "unknown experiment \"" + tag + "\"");
    }

    if (!j.contains("kernel")) {
        c.add("config.kernel", "missing kernel (inline object, {\"file\": path}, or path string)");
    } else if (j["kernel"].is_string()) {
        // Bare string shorthand for {"file": path}.
        const auto path = std::filesystem::path(base_dir) / j["kernel"].get<std::string>();
        try {
            cfg.kernel = read_kernel_file(path.string());
        } catch (const Error& e) {
            c.add("config.kernel", e.what());
        }
    } else if (!j["kernel"].is_object()) {
        c.add("config.kernel", "must be an object or a path string");
    } else if (j["kernel"].contains("file")) {
        c.check_keys(j["kernel"], "kernel", {"file"});
        if (!j["kernel"]["file"].is_string()) {
            c.add("config.kernel.file", "must be a string path");
        } else {
            const auto path =
                std::filesystem::path(base_dir) / j["kernel"]["file"].get<std::string>();
            try {
                cfg.kernel = read_kernel_file(path.string());
            } catch (const Error& e) {
                c.add("config.kernel", e.what());
            }
        }
    } else {
        try {
            cfg.kernel = parse_kernel_text(j["kernel"].dump());
        } catch (const Error& e) {
            c.add("config.kernel", e.what());
        }
    }

    if (j.contains("params")) {
        if (!j["params"].is_object()) {
            c.add("config.params", "must be an object");
        } else {
            c.check_keys(j["params"], "params", {"beta", "gamma"});
            double beta = cfg.params.beta, gamma = cfg.params.gamma;
            c.real(j["params"], "beta", "params", beta);
            c.real(j["params"], "gamma", "params", gamma);
            try {
                cfg.params = make_params(beta, gamma);
            } catch (const Error& e) {
                c.add("config.params", e.what());
            }
        }
    }

    if (j.contains("integrator")) {
        if (!j["integrator"].is_object()) {
            c.add("config.integrator", "must be an object");
        } else {
            parse_integrator(j["integrator"], c, cfg.integrator);
        }
    }

    if (j.contains("options")) {
        if (!j["options"].is_object()) {
            c.add("config.options", "must be an object");
        } else {
            parse_options(j["options"], c, cfg.options);
        }
    }

    c.text(j, "output_dir", "config", cfg.output_dir);

    if (cfg.experiment == Experiment::UsicAlign && out.errors.empty() &&
        cfg.options.levels.empty()) {
        c.add("options.levels", "usic-align requires a non-empty family of initial prevalences");
    }

    if (out.errors.empty()) {
        cfg.echo = j.dump(2) + "\n";
        out.config = std::move(cfg);
    }
    return out;
}

std::string apply_config_overrides(const std::string& text,
                                   const std::vector<std::string>& overrides) {
    const char* where = "config.apply_overrides";
    json j;
    try {
        j = text.empty() ? json::object() : json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(where, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ValidationError(where, "top level must be an object");
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ValidationError(where, "override \"" + ov + "\" is not of the form key=value");
        }
        const std::string path = ov.substr(0, eq);
        const std::string value = ov.substr(eq + 1);

        json* node = &j;
        std::size_t start = 0;
        while (true) {
            const auto dot = path.find('.', start);
            const std::string key = path.substr(start, dot - start);
            if (key.empty()) {
                throw ValidationError(where, "override path \"" + path + "\" has an empty key");
            }
            if (dot == std::string::npos) {
                json parsed = json::parse(value, nullptr, false);
                (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
                break;
            }
            json& next = (*node)[key];
            if (next.is_null()) {
                next = json::object();
            } else if (!next.is_object()) {
                throw ValidationError(where, "override path \"" + path +
                                                 "\" descends into a non-object at \"" + key +
                                                 "\"");
            }
            node = &next;
            start = dot + 1;
        }
    }
    return j.dump(2) + "\n";
}

} // namespace gsis
