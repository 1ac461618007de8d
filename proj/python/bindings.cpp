#include "stratlab/errors.hpp"
#include "stratlab/harness.hpp"
#include "stratlab/nonzero.hpp"
#include "stratlab/report.hpp"
#include "stratlab/streak.hpp"
#include "stratlab/symbols.hpp"
#include "stratlab/verify.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace stratlab;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Linearised stratified Couette flow: symbols, streak solutions and check sweeps.";

    py::register_exception<ParameterGateError>(m, "ParameterGateError", PyExc_ValueError);
    py::register_exception<DegenerateModeError>(m, "DegenerateModeError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<PhysParams>(m, "PhysParams")
        .def(py::init([](double nu, double kappa, double beta) { return PhysParams{nu, kappa, beta}; }),
             py::arg("nu") = 1e-2, py::arg("kappa") = 1e-2, py::arg("beta") = 1.0)
        .def_readwrite("nu", &PhysParams::nu)
        .def_readwrite("kappa", &PhysParams::kappa)
        .def_readwrite("beta", &PhysParams::beta)
        .def("__repr__", [](const PhysParams& p) {
            return "PhysParams(nu=" + format_double(p.nu) + ", kappa=" + format_double(p.kappa) +
                   ", beta=" + format_double(p.beta) + ")";
        });

    py::class_<ModeIndex>(m, "ModeIndex")
        .def(py::init([](std::int64_t k, std::int64_t l, double eta) { return ModeIndex{k, l, eta}; }),
             py::arg("k"), py::arg("l"), py::arg("eta"))
        .def_readwrite("k", &ModeIndex::k)
        .def_readwrite("l", &ModeIndex::l)
        .def_readwrite("eta", &ModeIndex::eta);

    py::class_<RateConstants>(m, "RateConstants")
        .def_readonly("beta", &RateConstants::beta)
        .def_readonly("lambda_nu", &RateConstants::lambda_nu)
        .def_readonly("lambda_kappa", &RateConstants::lambda_kappa)
        .def_readonly("lambda_", &RateConstants::lambda)
        .def_readonly("c_beta", &RateConstants::c_beta);

    m.def("theorem1_applicable", &theorem1_applicable, py::arg("params"));
    m.def("symbol_p", &symbol_p, py::arg("t"), py::arg("mode"));
    m.def("symbol_p_prime", &symbol_p_prime, py::arg("t"), py::arg("mode"));
    m.def("integral_p", &integral_p, py::arg("t"), py::arg("mode"));
    m.def("integral_p_power_over_line", &integral_p_power_over_line, py::arg("mode"), py::arg("power"));
    m.def("rate_constants", &rate_constants, py::arg("params"));

    py::class_<StreakState>(m, "StreakState")
        .def(py::init([](cplx u1, cplx u2, cplx u3, cplx theta) { return StreakState{u1, u2, u3, theta}; }),
             py::arg("u1") = cplx{}, py::arg("u2") = cplx{}, py::arg("u3") = cplx{}, py::arg("theta") = cplx{})
        .def_readwrite("u1", &StreakState::u1)
        .def_readwrite("u2", &StreakState::u2)
        .def_readwrite("u3", &StreakState::u3)
        .def_readwrite("theta", &StreakState::theta);

    m.def("propagate_streak", &propagate_streak, py::arg("initial"), py::arg("t"), py::arg("params"), py::arg("eta"),
          py::arg("l"));
    m.def("liftup_baseline", &liftup_baseline, py::arg("initial"), py::arg("t"), py::arg("params"), py::arg("eta"),
          py::arg("l"));
    m.def(
        "integrate_streak_numerically",
        [](const StreakState& s, const std::vector<double>& times, const PhysParams& p, double eta, std::int64_t l) {
            return integrate_streak_numerically(s, times, p, eta, l);
        },
        py::arg("initial"), py::arg("times"), py::arg("params"), py::arg("eta"), py::arg("l"));

    py::class_<ReportRow>(m, "ReportRow")
        .def_readonly("scenario", &ReportRow::scenario)
        .def_readonly("mode_k", &ReportRow::mode_k)
        .def_readonly("mode_l", &ReportRow::mode_l)
        .def_readonly("eta", &ReportRow::eta)
        .def_readonly("check", &ReportRow::check)
        .def_readonly("statistic", &ReportRow::statistic)
        .def_readonly("threshold", &ReportRow::threshold)
        .def_readonly("passed", &ReportRow::pass)
        .def_readonly("wall_ms", &ReportRow::wall_ms)
        .def_readonly("note", &ReportRow::note);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("id", &ScenarioConfig::id)
        .def_readwrite("params", &ScenarioConfig::params)
        .def_readwrite("k_values", &ScenarioConfig::k_values)
        .def_readwrite("l_values", &ScenarioConfig::l_values)
        .def_readwrite("eta_points", &ScenarioConfig::eta_points)
        .def_readonly("warnings", &ScenarioConfig::warnings)
        .def_property_readonly("checks", [](const ScenarioConfig& c) {
            std::vector<std::string> out;
            for (Check k : c.checks) out.emplace_back(check_name(k));
            return out;
        });

    m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
    m.def("standard_suite", &standard_suite);
    m.def(
        "run_sweep",
        [](const std::vector<ScenarioConfig>& scenarios, std::optional<std::size_t> workers) {
            py::gil_scoped_release release;
            return run_sweep(std::span<const ScenarioConfig>(scenarios), {resolve_workers(workers), false, ""});
        },
        py::arg("scenarios"), py::arg("workers") = py::none());
    m.def(
        "emit_report",
        [](const std::vector<ReportRow>& rows, const std::string& format) {
            if (format != "csv" && format != "jsonl") throw py::value_error("format must be csv or jsonl");
            return emit_report(rows, format == "csv" ? ReportFormat::csv : ReportFormat::jsonl);
        },
        py::arg("rows"), py::arg("format") = "csv");
    m.def(
        "verify_streaks",
        [](bool fine, std::optional<std::size_t> workers) {
            py::gil_scoped_release release;
            return verify_streaks(fine, resolve_workers(workers));
        },
        py::arg("fine") = false, py::arg("workers") = py::none());
    m.def("baseline_liftup", [] {
        py::gil_scoped_release release;
        return baseline_liftup();
    });
}
