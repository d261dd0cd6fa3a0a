#include "gsis/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "gsis/errors.hpp"

namespace gsis {

using nlohmann::json;

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void append_real_array(std::string& out, const std::vector<double>& vals) {
    out += '[';
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format_real(vals[i]);
    }
    out += ']';
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ValidationError(where, "unknown key \"" + item.key() + "\"");
        }
    }
}

double get_real(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw ValidationError(where, std::string("missing key \"") + key + "\"");
    }
    if (!j[key].is_number()) {
        throw ValidationError(where, std::string("key \"") + key + "\" must be a number");
    }
    return j[key].get<double>();
}

std::vector<double> get_real_array(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) {
        throw ValidationError(where, std::string("missing key \"") + key + "\"");
    }
    if (!j[key].is_array()) {
        throw ValidationError(where, std::string("key \"") + key + "\" must be an array");
    }
    std::vector<double> out;
    out.reserve(j[key].size());
    for (const auto& v : j[key]) {
        if (!v.is_number()) {
            throw ValidationError(where,
                                  std::string("key \"") + key + "\" must contain numbers only");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

std::string kernel_to_text(const KernelSpec& k) {
    std::string out = "{\n  \"variant\": \"" + variant_name(k) + "\",\n";
    if (const auto* db = std::get_if<DiscreteBlock>(&k)) {
        out += "  \"cell_weights\": ";
        append_real_array(out, db->partition->weights());
        out += ",\n  \"matrix\": ";
        append_real_array(out, db->matrix);
        if (db->annealed) {
            out += ",\n  \"annealed\": {\n    \"degrees\": ";
            append_real_array(out, db->annealed->degrees);
            out += ",\n    \"pk\": ";
            append_real_array(out, db->annealed->pk);
            out += ",\n    \"uncorrelated\": ";
            out += db->annealed->uncorrelated ? "true" : "false";
            out += "\n  }";
        }
    } else if (const auto* r1 = std::get_if<RankOne>(&k)) {
        out += "  \"lambda1\": " + format_real(r1->lambda1) + ",\n  \"edges\": ";
        append_real_array(out, r1->phi1.partition->edges());
        out += ",\n  \"phi1\": ";
        append_real_array(out, r1->phi1.values);
    } else if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        out += "  \"lambda1\": " + format_real(pl->lambda1) + ",\n";
        out += "  \"p\": " + format_real(pl->p) + ",\n";
        out += "  \"grid_size\": " + std::to_string(pl->grid_size) + ",\n";
        out += "  \"kappa\": " + format_real(pl->kappa);
    } else if (const auto* gs = std::get_if<GridSampled>(&k)) {
        out += "  \"edges\": ";
        append_real_array(out, gs->partition->edges());
        out += ",\n  \"values\": ";
        append_real_array(out, gs->values);
    }
    out += "\n}\n";
    return out;
}

KernelSpec parse_kernel_text(const std::string& text) {
    const char* where = "io.parse_kernel_text";
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(where, std::string("malformed kernel text: ") + e.what());
    }
    if (!j.is_object() || !j.contains("variant") || !j["variant"].is_string()) {
        throw ValidationError(where, "kernel text must be an object with a \"variant\" string");
    }
    const std::string variant = j["variant"].get<std::string>();
    if (variant == "discrete_block") {
        reject_unknown_keys(j, {"variant", "cell_weights", "matrix", "annealed"}, where);
        auto part = std::make_shared<const Partition>(
            Partition::from_weights(get_real_array(j, "cell_weights", where)));
        KernelSpec k = make_discrete_block(part, get_real_array(j, "matrix", where));
        if (j.contains("annealed")) {
            const json& a = j["annealed"];
            reject_unknown_keys(a, {"degrees", "pk", "uncorrelated"}, where);
            AnnealedInfo info;
            info.degrees = get_real_array(a, "degrees", where);
            info.pk = get_real_array(a, "pk", where);
            info.uncorrelated = a.value("uncorrelated", false);
            std::get<DiscreteBlock>(k).annealed = std::move(info);
        }
        return k;
    }
    if (variant == "power_law") {
        reject_unknown_keys(j, {"variant", "lambda1", "p", "grid_size", "kappa"}, where);
        const double lambda1 = get_real(j, "lambda1", where);
        const double p = get_real(j, "p", where);
        std::size_t grid_size = 2000;
        if (j.contains("grid_size")) {
            if (!j["grid_size"].is_number_unsigned()) {
                throw ValidationError(where, "grid_size must be a non-negative integer");
            }
            grid_size = j["grid_size"].get<std::size_t>();
        }
        const double kappa = j.contains("kappa") ? get_real(j, "kappa", where) : 0.0;
        return make_power_law(lambda1, p, grid_size, kappa);
    }
    if (variant == "rank_one") {
        reject_unknown_keys(j, {"variant", "lambda1", "edges", "phi1"}, where);
        auto part =
            std::make_shared<const Partition>(Partition(get_real_array(j, "edges", where)));
        return make_rank_one(get_real(j, "lambda1", where),
                             Field(part, get_real_array(j, "phi1", where)));
    }
    if (variant == "grid_sampled") {
        reject_unknown_keys(j, {"variant", "edges", "values"}, where);
        auto part =
            std::make_shared<const Partition>(Partition(get_real_array(j, "edges", where)));
        return make_grid_sampled(part, get_real_array(j, "values", where));
    }
    throw ValidationError(where, "unknown kernel variant \"" + variant + "\"");
}

void write_kernel_file(const KernelSpec& k, const std::string& path) {
    write_text_file(path, kernel_to_text(k));
}

KernelSpec read_kernel_file(const std::string& path) {
    return parse_kernel_text(read_text_file(path));
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::string out = "t,prevalence,c1,l2\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += format_real(traj.times[i]);
        out += ',';
        out += format_real(traj.prevalence[i]);
        out += ',';
        out += format_real(traj.c1[i]);
        out += ',';
        out += format_real(traj.l2[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_trajectory_wide_csv(const Trajectory& traj, const std::string& path) {
    const std::size_t n = traj.partition ? traj.partition->size() : 0;
    std::string out = "t";
    for (std::size_t j = 0; j < n; ++j) {
        out += ",cell_" + std::to_string(j);
    }
    out += '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += format_real(traj.times[i]);
        for (std::size_t j = 0; j < n; ++j) {
            out += ',';
            out += format_real(traj.states[i][j]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

TrajectorySummaries read_trajectory_csv(const std::string& path) {
    const char* where = "io.read_trajectory_csv";
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "t,prevalence,c1,l2") {
        throw ValidationError(where, "expected header \"t,prevalence,c1,l2\" in " + path);
    }
    TrajectorySummaries out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        double t, prev, c1, l2;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &prev, &c1, &l2) != 4) {
            throw ValidationError(where, "malformed row at line " + std::to_string(lineno) +
                                             " of " + path);
        }
        out.times.push_back(t);
        out.prevalence.push_back(prev);
        out.c1.push_back(c1);
        out.l2.push_back(l2);
    }
    return out;
}

void write_chi_csv(const ChiCurve& curve, const std::string& path) {
    std::string out = "prevalence,si_links\n";
    for (std::size_t i = 0; i < curve.prevalence.size(); ++i) {
        out += format_real(curve.prevalence[i]);
        out += ',';
        out += format_real(curve.si_links[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_omega_csv(const OmegaCurve& curve, const std::string& path) {
    std::string out = "t,omega,prevalence\n";
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
        out += format_real(curve.t[i]);
        out += ',';
        out += format_real(curve.omega[i]);
        out += ',';
        out += format_real(curve.prevalence[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_field_csv(const Field& f, const std::string& name, const std::string& path) {
    std::string out = "x," + name + "\n";
    const auto& mid = f.partition->midpoints();
    for (std::size_t i = 0; i < f.size(); ++i) {
        out += format_real(mid[i]);
        out += ',';
        out += format_real(f[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("io.read_text_file", "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("io.write_text_file", "cannot open " + path + " for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw ValidationError("io.write_text_file", "write to " + path + " failed");
    }
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    write_text_file(tmp, content);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw ValidationError("io.write_text_file_atomic",
                              "rename " + tmp + " -> " + path + ": " + ec.message());
    }
}

} // namespace gsis
