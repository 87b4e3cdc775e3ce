#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ringjsa/io.hpp"
#include "ringjsa/pipeline.hpp"

namespace py = pybind11;
using namespace ringjsa;
using nlohmann::json;

namespace {

RunConfig config_from(const std::string& text)
{
    if (text.empty()) return RunConfig::defaults();
    return parse_run_config(json::parse(text));
}

py::dict jsa_dict(const ComplexJSA& jsa)
{
    py::dict d;
    d["signal_omega"] = jsa.grid.signal();
    d["idler_omega"] = jsa.grid.idler();
    d["values"] = jsa.values;
    return d;
}

ComplexJSA jsa_from(const ComplexMatrix& values)
{
    const auto rows = static_cast<std::size_t>(values.rows()), cols = static_cast<std::size_t>(values.cols());
    return ComplexJSA(SpectralGrid::uniform(0.0, 1.0, rows, 0.0, 1.0, cols), values);
}

Band band_from(const std::string& name)
{
    if (name == "pump") return Band::pump;
    if (name == "signal") return Band::signal;
    if (name == "idler") return Band::idler;
    throw ConfigError("band must be pump, signal or idler");
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Ring-resonator biphoton JSA simulation and stimulated-emission reconstruction";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    m.def("default_config", [] { return to_json(RunConfig::defaults()).dump(); },
          "Default run configuration as JSON text.");
    m.def("normalize_config", [](const std::string& text) { return to_json(config_from(text)).dump(); },
          py::arg("config_json"), "Validates a JSON config and returns it with every key filled in.");

    m.def("field_enhancement",
          [](const std::vector<double>& omega, const std::string& band, const std::string& config) {
              const RunConfig cfg = config_from(config);
              std::vector<cdouble> out;
              for (double w : omega) out.push_back(field_enhancement(cfg.ring, w, band_from(band)));
              return out;
          },
          py::arg("omega"), py::arg("band") = "signal", py::arg("config_json") = "");
    m.def("through_transfer",
          [](const std::vector<double>& omega, const std::string& band, const std::string& config) {
              const RunConfig cfg = config_from(config);
              std::vector<cdouble> out;
              for (double w : omega) out.push_back(through_transfer(cfg.ring, w, band_from(band)));
              return out;
          },
          py::arg("omega"), py::arg("band") = "signal", py::arg("config_json") = "");

    m.def("campaign_truth", [](const std::string& config) { return jsa_dict(campaign_truth(config_from(config))); },
          py::arg("config_json") = "", "Unfiltered ring JSA on the campaign grid, rows = signal.");
    m.def("dense_truth", [](const std::string& config) { return jsa_dict(dense_truth(config_from(config))); },
          py::arg("config_json") = "", "Ring JSA on the dense square grid used for Schmidt numbers.");

    m.def("schmidt_number",
          [](const ComplexMatrix& values, bool intensity_only) {
              const ComplexJSA jsa = jsa_from(values);
              const SchmidtResult s = intensity_only ? schmidt_number_intensity_only(jsa) : schmidt_number(jsa);
              return py::make_tuple(s.K, s.singular_values);
          },
          py::arg("values"), py::arg("intensity_only") = false,
          "Returns (K, normalized singular values) for a JSA sampled on a uniform grid.");
    m.def("fidelity_intensity", [](const RealMatrix& a, const RealMatrix& b) { return fidelity_intensity(a, b).value; });
    m.def("fidelity_complex", [](const ComplexMatrix& a, const ComplexMatrix& b) {
        const MaskMatrix all = MaskMatrix::Constant(a.rows(), a.cols(), true);
        const FidelityResult f = fidelity_complex(a, b, all);
        return py::make_tuple(f.value, f.phase_offset);
    });

    m.def("fit_fringe_point",
          [](const std::vector<double>& schedule, const std::vector<double>& counts) {
              const FringePointFit f = fit_fringe_point(schedule, counts);
              py::dict d;
              d["amplitude"] = f.amplitude;
              d["background"] = f.background;
              d["delta"] = f.delta;
              d["sigma_delta"] = f.sigma_delta;
              return d;
          },
          py::arg("schedule"), py::arg("counts"));

    m.def("simulate", [](const std::string& config, const std::string& out) {
        return cmd_simulate(config_from(config), out).dump();
    }, py::arg("config_json"), py::arg("out_dir"), py::call_guard<py::gil_scoped_release>());
    m.def("synthesize", [](const std::string& config, const std::string& truth, const std::string& out) {
        return cmd_synthesize(config_from(config), truth, out).dump();
    }, py::arg("config_json"), py::arg("truth_dir"), py::arg("out_dir"), py::call_guard<py::gil_scoped_release>());
    m.def("reconstruct", [](const std::string& in, const std::string& out) {
        return cmd_reconstruct(in, out).dump();
    }, py::arg("measurement_dir"), py::arg("out_dir"), py::call_guard<py::gil_scoped_release>());
    m.def("report", [](const std::string& in, const std::string& truth, std::size_t trials, std::uint64_t seed) {
        return cmd_report(in, truth, trials, seed).dump();
    }, py::arg("result_dir"), py::arg("truth_dir") = "", py::arg("trials") = 200, py::arg("seed") = 42,
       py::call_guard<py::gil_scoped_release>());

    m.def("read_jsa", [](const std::string& path) { return jsa_dict(io::read_jsa(path)); }, py::arg("path"));
}
