/// @file bindings.cpp
/// @brief Thin python module over the main operations: kernel construction,
/// spectral data, SIS/SI integration, the endemic state, and the chi curve.
/// Results come back as plain dicts of lists; anything heavier (alignment
/// sweeps, eternal constructions, CSV manifests) stays on the C++ CLI.

#include <memory>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gsis/dynamics.hpp"
#include "gsis/kernel.hpp"
#include "gsis/partition.hpp"
#include "gsis/si_closed_form.hpp"
#include "gsis/spectrum.hpp"
#include "gsis/version.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace gsis;

namespace {

/// KernelSpec is a std::variant, which pybind11 would otherwise unpack into
/// per-alternative python types; this holder keeps one opaque Kernel class.
struct PyKernel {
    KernelSpec spec;
};

/// Scalars broadcast to a constant field; sequences must match the cell count.
Field as_field(const KernelSpec& k, const py::object& u0) {
    if (py::isinstance<py::float_>(u0) || py::isinstance<py::int_>(u0)) {
        return Field::constant(partition_of(k), u0.cast<double>());
    }
    return Field(partition_of(k), u0.cast<std::vector<double>>());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "SIS/SI dynamics on graphon kernels (core bindings)";
    m.attr("__version__") = kVersion;

    py::class_<PyKernel>(m, "Kernel")
        .def_property_readonly("variant", [](const PyKernel& k) { return variant_name(k.spec); })
        .def_property_readonly("cells",
                               [](const PyKernel& k) { return partition_of(k.spec)->size(); })
        .def_property_readonly("weights",
                               [](const PyKernel& k) { return partition_of(k.spec)->weights(); })
        .def_property_readonly("midpoints",
                               [](const PyKernel& k) { return partition_of(k.spec)->midpoints(); })
        .def("value_at",
             [](const PyKernel& k, double x, double y) { return kernel_value_at(k.spec, x, y); },
             "x"_a, "y"_a, "Pointwise kernel value W(x, y).")
        .def("apply",
             [](const PyKernel& k, const std::vector<double>& f) {
                 return apply_operator(k.spec, Field(partition_of(k.spec), f)).values;
             },
             "f"_a, "Integral operator (Wf)(x) on per-cell values.")
        .def("distance",
             [](const PyKernel& a, const PyKernel& b) { return kernel_distance(a.spec, b.spec); },
             "other"_a, "L2 kernel distance on the common refinement.");

    m.def(
        "power_law",
        [](double lambda1, double p, std::size_t grid_size, double kappa) {
            return PyKernel{make_power_law(lambda1, p, grid_size, kappa)};
        },
        "lambda1"_a, "p"_a, "grid_size"_a = 2000, "kappa"_a = 0.0,
        "Rank-1 power-law kernel lambda1 (1-2p) x^-p y^-p on a graded mesh.");

    m.def(
        "discrete_block",
        [](const std::vector<double>& weights, const std::vector<std::vector<double>>& matrix) {
            auto part = std::make_shared<const Partition>(Partition::from_weights(weights));
            std::vector<double> flat;
            flat.reserve(weights.size() * weights.size());
            for (const auto& row : matrix) {
                flat.insert(flat.end(), row.begin(), row.end());
            }
            return PyKernel{make_discrete_block(std::move(part), std::move(flat))};
        },
        "weights"_a, "matrix"_a,
        "Piecewise-constant kernel W_ij on cells of the given weights.");

    m.def(
        "annealed",
        [](const std::vector<double>& degrees, const std::vector<double>& pk,
           const std::vector<double>& conditional) {
            return PyKernel{build_annealed(degrees, pk, conditional)};
        },
        "degrees"_a, "pk"_a, "conditional"_a = std::vector<double>{},
        "Annealed-network kernel from a degree distribution; empty conditional "
        "selects the uncorrelated closure.");

    m.def(
        "spectrum",
        [](const PyKernel& k, double tol) {
            Spectrum s = leading_eigenpair(k.spec, tol);
            py::dict d;
            d["lambda1"] = s.lambda1;
            d["lambda2"] = second_eigenvalue(k.spec, s, tol);
            d["phi1"] = s.phi1.values;
            d["residual"] = s.residual;
            d["iterations"] = s.iterations;
            return d;
        },
        "kernel"_a, "tol"_a = 1e-12, "Leading eigenpair and second eigenvalue.");

    m.def(
        "endemic",
        [](const PyKernel& k, double beta, double gamma, double tol) {
            const EndemicState st = endemic_solve(k.spec, make_params(beta, gamma), tol);
            py::dict d;
            d["psi"] = st.psi.values;
            d["residual"] = st.residual;
            d["method"] = st.method;
            d["iterations"] = st.iterations;
            d["c_star"] = st.c_star ? py::cast(*st.c_star) : py::none();
            return d;
        },
        "kernel"_a, "beta"_a, "gamma"_a, "tol"_a = 1e-12,
        "Nontrivial endemic state of beta (1-psi) W psi = gamma psi.");

    m.def(
        "simulate",
        [](const PyKernel& k, double beta, double gamma, const py::object& u0, double t0,
           double t1, double dt, double rel_tol, double abs_tol) {
            IntegratorConfig cfg;
            cfg.rel_tol = rel_tol;
            cfg.abs_tol = abs_tol;
            const Trajectory tr = integrate(k.spec, make_params(beta, gamma),
                                            as_field(k.spec, u0), t0, t1, cfg,
                                            uniform_samples(t0, t1, dt));
            py::dict d;
            d["t"] = tr.times;
            d["prevalence"] = tr.prevalence;
            d["c1"] = tr.c1;
            d["l2"] = tr.l2;
            d["states"] = tr.states;
            d["steps"] = tr.stats.steps;
            return d;
        },
        "kernel"_a, "beta"_a, "gamma"_a, "u0"_a, "t0"_a = 0.0, "t1"_a = 10.0, "dt"_a = 0.1,
        "rel_tol"_a = 1e-10, "abs_tol"_a = 1e-12,
        "Integrate the SIS flow; u0 is a scalar (constant field) or per-cell values.");

    m.def(
        "chi_curve",
        [](const PyKernel& k, double beta, std::size_t n_samples) {
            const SIClosedForm cf = make_si_closed_form(k.spec, make_params(beta, 0.0));
            const ChiCurve c = chi_curve(cf, n_samples);
            py::dict d;
            d["prevalence"] = c.prevalence;
            d["si_links"] = c.si_links;
            d["phi1_bar"] = c.phi1_bar;
            return d;
        },
        "kernel"_a, "beta"_a = 1.0, "n_samples"_a = 200,
        "Prevalence-to-SI-links curve of the closed-form SI solution.");
}
