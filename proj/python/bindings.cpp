#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cpsfwm/cli.hpp"
#include "cpsfwm/errors.hpp"
#include "cpsfwm/figures.hpp"
#include "cpsfwm/metrics.hpp"

namespace py = pybind11;
using namespace cpsfwm;

namespace {

source::SourceConfig make_config(double core_radius_m, double numerical_aperture, double length_m, double lambda1_m,
                                 double sigma1, double lambda2_m, double sigma2, const std::string& mode,
                                 double power1_w, double power2_w) {
    dispersion::FiberSpec fiber;
    fiber.core_radius = core_radius_m;
    fiber.numerical_aperture = numerical_aperture;
    fiber.length = length_m;
    auto cfg = source::make_source(fiber, lambda1_m, sigma1, lambda2_m, sigma2, dispersion::parse_mode(mode));
    cfg.pump1.avg_power = power1_w;
    cfg.pump2.avg_power = power2_w;
    cfg.validate();
    return cfg;
}

jsa::JointSpectrum compute(const source::SourceModel& m, const std::string& method, int n) {
    const auto grid = jsa::default_grid(m, n);
    const bool mixed = m.config().mixed();
    if (method == "linear") return mixed ? jsa::jsa_mixed_linear(m, grid) : jsa::jsa_pulsed_linear(m, grid);
    if (method == "numeric") return mixed ? jsa::jsa_mixed(m, grid) : jsa::jsa_pulsed_numeric(m, grid);
    throw std::invalid_argument("method must be 'numeric' or 'linear'");
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Counter-propagating SFWM photon-pair source model";

    // Subclasses first so the more specific Python types are used.
    auto physics = py::register_exception<PhysicsError>(mod, "PhysicsError", PyExc_ValueError);
    py::register_exception<ModeNotGuided>(mod, "ModeNotGuided", physics.ptr());
    py::register_exception<UnsupportedConfiguration>(mod, "UnsupportedConfiguration", physics.ptr());
    py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(mod, "ConvergenceError", PyExc_RuntimeError);

    mod.def("erf", &numerics::erf_complex, py::arg("z"));
    mod.def("faddeeva", &numerics::faddeeva_w, py::arg("z"));
    mod.def("sinc", &numerics::sinc, py::arg("x"));
    mod.def("phi_p", &jsa::phi_p, py::arg("x"), py::arg("B"), py::arg("Lambda"));

    mod.def("sellmeier_index", [](double lambda_m) { return dispersion::sellmeier_index(lambda_m); },
            py::arg("wavelength_m"));
    mod.def(
        "dispersion_sample",
        [](double core_radius_m, double na, const std::string& mode, double omega) {
            dispersion::FiberSpec f;
            f.core_radius = core_radius_m;
            f.numerical_aperture = na;
            const auto s = dispersion::sample(f, dispersion::parse_mode(mode), omega);
            return py::dict(py::arg("omega") = s.omega, py::arg("k") = s.k, py::arg("k_prime") = s.k_prime,
                            py::arg("n_eff") = s.n_eff);
        },
        py::arg("core_radius_m"), py::arg("numerical_aperture"), py::arg("mode"), py::arg("omega"));
    mod.def(
        "guided_modes",
        [](double core_radius_m, double na, double lambda_m) {
            dispersion::FiberSpec f;
            f.core_radius = core_radius_m;
            f.numerical_aperture = na;
            std::vector<std::string> names;
            for (const auto& g : dispersion::solve_lp_modes(f, lambda_m)) names.push_back(g.mode.name());
            return names;
        },
        py::arg("core_radius_m"), py::arg("numerical_aperture"), py::arg("wavelength_m"));

    py::class_<source::SourceConfig>(mod, "SourceConfig")
        .def(py::init(&make_config), py::kw_only(), py::arg("core_radius_m") = 1.5e-6,
             py::arg("numerical_aperture") = 0.13, py::arg("length_m") = 0.01, py::arg("lambda1_m") = 820e-9,
             py::arg("sigma1") = 0.01e12, py::arg("lambda2_m") = 532e-9, py::arg("sigma2") = 0.01e12,
             py::arg("mode") = "LP01", py::arg("power1_w") = 0.05, py::arg("power2_w") = 0.05)
        .def_property_readonly("mixed", &source::SourceConfig::mixed)
        .def_property_readonly("length_m", [](const source::SourceConfig& c) { return c.fiber.length; });

    py::class_<source::SourceModel>(mod, "SourceModel")
        .def(py::init<source::SourceConfig>(), py::arg("config"))
        .def_property_readonly("omega_s", &source::SourceModel::omega_s)
        .def_property_readonly("omega_i", &source::SourceModel::omega_i)
        .def_property_readonly("k1p", &source::SourceModel::k1p)
        .def_property_readonly("k2p", &source::SourceModel::k2p)
        .def("with_length", &source::SourceModel::with_length, py::arg("length_m"))
        .def("with_bandwidths", &source::SourceModel::with_bandwidths, py::arg("sigma1"), py::arg("sigma2"))
        .def("temporal_params",
             [](const source::SourceModel& m) {
                 const auto t = source::temporal_params(m);
                 return py::dict(py::arg("t12") = t.t12, py::arg("Ts") = t.Ts, py::arg("Ti") = t.Ti,
                                 py::arg("B") = t.B, py::arg("Lambda") = t.Lambda, py::arg("t1s") = t.t1s,
                                 py::arg("t1i") = t.t1i, py::arg("tau1s") = t.tau1s);
             })
        .def("gamma", [](const source::SourceModel& m) { return source::gamma_sfwm(m); })
        .def("effective_length", [](const source::SourceModel& m) { return metrics::effective_length(m); })
        .def("threshold_pulsed", [](const source::SourceModel& m) { return metrics::factorability_threshold_pulsed(m); })
        .def("threshold_mixed", [](const source::SourceModel& m) { return metrics::factorability_threshold_mixed(m); })
        .def("idler_bandwidth", [](const source::SourceModel& m) { return metrics::idler_bandwidth(m); });

    mod.def(
        "jsa",
        [](const source::SourceModel& m, const std::string& method, int n) {
            const auto f = compute(m, method, n);
            return py::make_tuple(f.grid.signal_axis, f.grid.idler_axis, f.amplitude);
        },
        py::arg("model"), py::arg("method") = "linear", py::arg("n") = 129,
        "Returns (signal_axis, idler_axis, amplitude); amplitude rows follow the signal axis.");

    mod.def(
        "purity",
        [](const Eigen::MatrixXcd& amplitude) {
            jsa::JointSpectrum f;
            f.amplitude = amplitude;
            const auto r = metrics::purity(f);
            return py::dict(py::arg("purity") = r.purity, py::arg("schmidt_number") = r.schmidt_number,
                            py::arg("singular_values") = r.singular_values);
        },
        py::arg("amplitude"));

    mod.def(
        "brightness",
        [](const source::SourceModel& m, const std::string& method) {
            const bool mixed = m.config().mixed();
            metrics::BrightnessResult r;
            if (method == "numeric") r = mixed ? metrics::brightness_mixed_numeric(m) : metrics::brightness_pulsed_numeric(m);
            else if (method == "closed_form") r = mixed ? metrics::brightness_mixed_closed(m) : metrics::brightness_pulsed_closed(m);
            else throw std::invalid_argument("method must be 'numeric' or 'closed_form'");
            return r.pairs_per_second;
        },
        py::arg("model"), py::arg("method") = "closed_form");

    mod.def(
        "intermodal_offsets",
        [](double core_radius_m, double na, double lambda1_m, double lambda2_m, const std::string& mode) {
            dispersion::FiberSpec f;
            f.core_radius = core_radius_m;
            f.numerical_aperture = na;
            const auto r = metrics::intermodal_offsets(f, lambda1_m, lambda2_m, dispersion::parse_mode(mode));
            return py::dict(py::arg("delta") = r.delta, py::arg("lambda_s") = r.lambda_s,
                            py::arg("lambda_i") = r.lambda_i, py::arg("dlambda_s") = r.dlambda_s,
                            py::arg("dlambda_i") = r.dlambda_i);
        },
        py::arg("core_radius_m"), py::arg("numerical_aperture"), py::arg("lambda1_m"), py::arg("lambda2_m"),
        py::arg("mode"));

    mod.def(
        "generate_figure",
        [](const std::string& id, const std::filesystem::path& dir, int grid) {
            const auto res = figures::generate(id, dir, {grid, 129});
            std::vector<std::string> files;
            for (const auto& p : res.files) files.push_back(p.string());
            return py::make_tuple(files, res.residuals);
        },
        py::arg("id"), py::arg("directory"), py::arg("grid") = 257);

    mod.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a cpsfwm command line in-process; returns (exit_code, stdout, stderr).");
}
