#include "kamprop/config.hpp"
#include "kamprop/experiments.hpp"
#include "kamprop/extended.hpp"
#include "kamprop/kam_general.hpp"
#include "kamprop/kam_su2.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <map>
#include <sstream>

namespace py = pybind11;
using namespace kamprop;

namespace {

std::array<double, 3> to_array(const PauliVector& v) { return {v.x, v.y, v.z}; }
PauliVector from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

SweepKind parse_kind(const std::string& kind) {
    if (kind == "sweep-eps" || kind == "epsilon") return SweepKind::epsilon;
    if (kind == "sweep-iters" || kind == "iterations") return SweepKind::iterations;
    if (kind == "sweep-area" || kind == "area") return SweepKind::area;
    throw ConfigError("unknown sweep kind '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_kamprop, m) {
    m.doc() = "KAM superconvergent propagators for pulse-driven two-level systems";

    py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<PulseShape>(m, "PulseShape")
        .def_static("sine_squared", &PulseShape::sine_squared, py::arg("total_area"))
        .def_static("tabulated", &PulseShape::tabulated, py::arg("t"), py::arg("omega"))
        .def_static("null_pulse", &PulseShape::null_pulse, py::arg("t_start") = 0.0, py::arg("t_end") = 1.0)
        .def("omega", &PulseShape::omega, py::arg("t"))
        .def("area", &PulseShape::area, py::arg("t"))
        .def_property_readonly("t_start", &PulseShape::t_start)
        .def_property_readonly("t_end", &PulseShape::t_end)
        .def_property_readonly("total_area", &PulseShape::total_area);

    m.def("xi_gamma", [](double x) {
        const XiGamma v = xi_gamma(x);
        return py::make_tuple(v.xi, v.gamma);
    }, py::arg("x"));
    m.def("next_level", [](const std::array<double, 3>& v, const std::array<double, 3>& vhat, double eps, int p) {
        return to_array(next_level(from_array(v), from_array(vhat), eps, p));
    }, py::arg("v"), py::arg("vhat"), py::arg("epsilon"), py::arg("p"));
    m.def("v1_at", [](const PulseShape& pulse, double t) { return to_array(v1_at(pulse, t)); },
          py::arg("pulse"), py::arg("t"));

    py::class_<KamHierarchy>(m, "KamHierarchy")
        .def(py::init([](double epsilon, int n_levels, const PulseShape& pulse, double tol) {
                 return build_hierarchy(KamConfig{epsilon, n_levels, pulse, tol, tol * 1e-3});
             }),
             py::arg("epsilon"), py::arg("n_levels"), py::arg("pulse"), py::arg("tol") = 1e-9)
        .def_property_readonly("levels", &KamHierarchy::levels)
        .def("vhat", [](const KamHierarchy& h, int p, double t) { return to_array(h.vhat(p, t)); },
             py::arg("p"), py::arg("t"))
        .def("v", [](const KamHierarchy& h, int p, double t) { return to_array(h.v(p, t)); },
             py::arg("p"), py::arg("t"))
        .def("transform", [](const KamHierarchy& h, int p, double t) { return Mat2(kam_T(h, p, t).matrix()); },
             py::arg("p"), py::arg("t"))
        .def("propagator_interaction",
             [](const KamHierarchy& h, double t, double t0, int levels) {
                 return Mat2(propagator_interaction(h, t, t0, levels).matrix());
             },
             py::arg("t"), py::arg("t0"), py::arg("levels") = -1)
        .def("propagator_lab",
             [](const KamHierarchy& h, double t, double t0, int levels) {
                 return Mat2(propagator_lab(h, t, t0, levels).matrix());
             },
             py::arg("t"), py::arg("t0"), py::arg("levels") = -1);

    m.def("experiment_pulse", &experiment_pulse, py::arg("area_over_pi"));
    m.def("reference_state", [](double eps, const PulseShape& pulse, double tol) {
        const ReferenceResult r = reference_state(eps, pulse, tol);
        return py::make_tuple(std::array<std::complex<double>, 2>{r.state.plus, r.state.minus}, r.drift);
    }, py::arg("epsilon"), py::arg("pulse"), py::arg("oracle_tol") = 1e-10,
       "Returns ((<+1|psi>, <-1|psi>), unitarity drift) of the reference integrator.");
    m.def("kam_state", [](double eps, const PulseShape& pulse, int n, double tol) {
        const StateVector2 s = kam_state(eps, pulse, n, tol);
        return std::array<std::complex<double>, 2>{s.plus, s.minus};
    }, py::arg("epsilon"), py::arg("pulse"), py::arg("n"), py::arg("tol") = 1e-9);
    m.def("delta_n", [](const std::array<std::complex<double>, 2>& a, const std::array<std::complex<double>, 2>& b) {
        return delta_n({a[0], a[1]}, {b[0], b[1]});
    }, py::arg("psi_ref"), py::arg("psi_kam"));

    m.def("run_sweep", [](const std::string& kind_name, const std::map<std::string, std::string>& settings) {
        const SweepKind kind = parse_kind(kind_name);
        ExperimentConfig c = ExperimentConfig::defaults(kind);
        // same keys as the CLI config file
        for (const auto& [key, value] : settings) apply_setting(c, key, value);
        std::vector<SweepRecord> rows;
        {
            py::gil_scoped_release release;
            rows = run_sweep(kind, c);
        }
        std::ostringstream csv;
        write_csv(csv, kind, c, rows);
        return csv.str();
    }, py::arg("kind"), py::arg("settings") = std::map<std::string, std::string>{},
       "Runs a sweep with config-file style settings and returns the CSV text.");
    m.attr("CSV_HEADER") = std::string(kCsvHeader);

    m.def("final_state_errors", [](double eps, double area_over_pi, int n_max, double tol) {
        const auto r = extended::final_state_errors(eps, area_over_pi, n_max, tol);
        return py::make_tuple(r.delta, r.p_numeric);
    }, py::arg("epsilon"), py::arg("area_over_pi"), py::arg("n_max"), py::arg("tol") = 1e-42,
       "Delta_0..Delta_n_max and P_numeric in 50-digit arithmetic.");

    m.def("autonomous_average", [](const general::Matrix& k0, const general::Matrix& v) {
        const general::AutonomousStep s = general::autonomous_average(general::EigenSystem::of(k0), v);
        return py::make_tuple(s.d, s.w);
    }, py::arg("k0"), py::arg("v"), "Returns (D, W) with [K0, D] = 0 and [K0, W] + V = D.");
    m.def("remainder_truncated", &general::remainder_truncated, py::arg("vhat"), py::arg("v"), py::arg("d"),
          py::arg("epsilon"), py::arg("p"), py::arg("max_terms") = 30);
}
