#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdmamud/analysis.hpp"
#include "cdmamud/detectors.hpp"
#include "cdmamud/harness.hpp"
#include "cdmamud/modem.hpp"

namespace py = pybind11;
using namespace cdmamud;

namespace {

py::dict stats_dict(const ErrorStats& e) {
  py::dict d;
  d["bit_errors"] = e.bit_errors;
  d["symbol_errors"] = e.symbol_errors;
  d["bits"] = e.bits;
  d["symbols"] = e.symbols;
  d["trials"] = e.trials;
  d["ber"] = e.ber();
  d["ser"] = e.ser();
  return d;
}

py::dict report_dict(const ScenarioReport& r) {
  py::list points;
  for (const auto& p : r.points) {
    py::dict d;
    d["ebn0_db"] = p.ebn0_db;
    d["trials"] = p.trials;
    d["cd"] = stats_dict(p.cd);
    d["pso"] = stats_dict(p.pso);
    py::list trace;
    for (const auto& t : p.pso_trace) trace.append(t.ber());
    d["pso_trace"] = trace;
    if (p.has_omud) d["omud"] = stats_dict(p.omud);
    d["sub_ber"] = p.sub.ber;
    d["sub_ser"] = p.sub.ser;
    d["trace_violations"] = p.trace_violations;
    points.append(d);
  }
  py::dict out;
  out["scenario"] = to_json(r.scenario).dump();
  out["hash"] = r.hash;
  out["notes"] = r.notes;
  out["points"] = points;
  out["csv"] = format_csv(std::span(&r, 1));
  return out;
}

Scenario resolve(const std::string& builtin, const std::string& overrides) {
  Scenario s = builtin.empty() ? Scenario{} : builtin_scenario(builtin);
  if (!overrides.empty()) s = scenario_from_json(nlohmann::json::parse(overrides), std::move(s));
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DS-CDMA multiuser detection core";
  m.attr("__version__") = CDMAMUD_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Constellation>(m, "Constellation")
      .def(py::init([](const std::string& name) { return Constellation(modulation_from_name(name)); }), py::arg("name"))
      .def_property_readonly("order", &Constellation::order)
      .def_property_readonly("bits_per_symbol", &Constellation::bits_per_symbol)
      .def_property_readonly("energy_scale", &Constellation::energy_scale)
      .def_property_readonly("levels", [](const Constellation& c) { return std::vector<int>(c.levels().begin(), c.levels().end()); })
      .def("bits_to_symbol", [](const Constellation& c, const Bits& bits) { return c.bits_to_symbol(bits); })
      .def("symbol_to_bits", &Constellation::symbol_to_bits)
      .def("decompose_real",
           [](const Constellation& c, const std::vector<std::complex<double>>& d) { return c.decompose_real(d); })
      .def("recompose_real", &Constellation::recompose_real);

  m.def("population_size", &population_size, py::arg("bits_per_symbol"), py::arg("users"), py::arg("symbols"));
  m.def("sigmoid", &sigmoid);
  m.def("sub_ser", [](int M, const std::vector<double>& nu) { return sub_ser(M, nu); }, py::arg("M"), py::arg("nu"));
  m.def("sub_ber_bpsk", [](const std::vector<double>& nu) { return sub_ber_bpsk(nu); }, py::arg("nu"));
  m.def("sub_ser_mgf", [](int M, const std::vector<double>& nu) { return sub_ser_mgf(M, nu); }, py::arg("M"),
        py::arg("nu"));
  m.def("min_trials", &min_trials, py::arg("rate"), py::arg("n_errors") = 100.0);

  m.def("scenario_names", &builtin_scenario_names);
  m.def("scenario_json", [](const std::string& builtin, const std::string& overrides) {
    return to_json(resolve(builtin, overrides)).dump();
  }, py::arg("builtin") = "", py::arg("overrides") = "");
  m.def(
      "run_scenario",
      [](const std::string& builtin, const std::string& overrides, int jobs, int shards) {
        const Scenario s = resolve(builtin, overrides);
        ScenarioReport r;
        {
          py::gil_scoped_release release;
          r = run_scenario(s, {jobs, shards});
        }
        return report_dict(r);
      },
      py::arg("builtin") = "", py::arg("overrides") = "", py::arg("jobs") = 1, py::arg("shards") = 0);
}
