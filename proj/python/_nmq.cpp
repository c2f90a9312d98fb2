#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nmq/config.hpp"
#include "nmq/control.hpp"
#include "nmq/errors.hpp"
#include "nmq/model.hpp"
#include "nmq/runner.hpp"

namespace py = pybind11;
using namespace nmq;

namespace {

py::dict run_config(const std::string& text, std::optional<std::string> scenario, std::optional<std::string> out,
                    unsigned threads) {
  std::optional<ScenarioId> forced;
  if (scenario) forced = parse_scenario_id(*scenario);
  ScenarioResult result;
  {
    py::gil_scoped_release release;
    result = run_scenario(parse_config(text, forced), threads);
  }
  py::dict csv;
  for (const auto& m : result.members) {
    if (m.run) csv[py::str(m.stem)] = trajectory_csv(*m.run, result.config.integrator.diagnostics);
    if (m.uncontrolled)
      csv[py::str(m.stem + "_uncontrolled")] = trajectory_csv(*m.uncontrolled, result.config.integrator.diagnostics);
  }
  if (out) write_outputs(result, *out);
  py::dict d;
  d["exit_code"] = exit_code(result);
  d["manifest"] = manifest_json(result);
  d["csv"] = csv;
  return d;
}

}  // namespace

PYBIND11_MODULE(_nmq, m) {
  m.doc() = "Non-Markovian open-system simulator for a time-cut XY chain.";

  static py::exception<Error> error(m, "NmqError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<ChainSpec>(m, "ChainSpec")
      .def(py::init([](int n_sites, double coupling, std::optional<int> cut_bond, double total_time) {
             return ChainSpec{n_sites, coupling, cut_bond.value_or(n_sites), total_time};
           }),
           py::arg("n_sites") = 5, py::arg("coupling") = -1.0, py::arg("cut_bond") = py::none(),
           py::arg("total_time") = 10.0)
      .def_readwrite("n_sites", &ChainSpec::n_sites)
      .def_readwrite("coupling", &ChainSpec::coupling)
      .def_readwrite("cut_bond", &ChainSpec::cut_bond)
      .def_readwrite("total_time", &ChainSpec::total_time)
      .def("omega", &ChainSpec::omega)
      .def("bond_coupling", &ChainSpec::bond_coupling, py::arg("bond"), py::arg("t"));

  py::class_<ControlSpec>(m, "ControlSpec")
      .def_readonly("intensity", &ControlSpec::intensity)
      .def_readonly("a", &ControlSpec::a)
      .def_readonly("b", &ControlSpec::b)
      .def_readonly("half_period", &ControlSpec::half_period)
      .def("pulse_frequency", &ControlSpec::pulse_frequency);

  py::class_<PulseCondition>(m, "PulseCondition")
      .def_readonly("n", &PulseCondition::n)
      .def_readonly("z", &PulseCondition::z)
      .def_readonly("residual", &PulseCondition::residual)
      .def_readonly("bessel_value", &PulseCondition::bessel_value)
      .def_readonly("is_valid", &PulseCondition::is_valid);

  m.def("bessel_j", &bessel_j, py::arg("n"), py::arg("x"));
  m.def("bessel_zero", &bessel_zero, py::arg("n"), py::arg("k"));
  m.def("design_pulse", &design_pulse, py::arg("n"), py::arg("zero_index"), py::arg("half_period"));
  m.def("condition_residual", &condition_residual, py::arg("control"), py::arg("zero_tol") = kZeroTolerance);

  m.def("energy_gap", &energy_gap_E21, py::arg("chain"), py::arg("t"));
  m.def("initial_state", &initial_state, py::arg("chain"));
  m.def("target_state", &target_state, py::arg("chain"));
  m.def("hamiltonian", [](const ChainSpec& c, double t) { return CutChain(c, HilbertSpec::sectors(c.n_sites, {1})).hamiltonian(t); },
        py::arg("chain"), py::arg("t"), "Single-excitation block of H_s(t).");

  m.def("parse_real", &parse_real, py::arg("text"));
  m.def("run_config", &run_config, py::arg("text"), py::arg("scenario") = py::none(), py::arg("out") = py::none(),
        py::arg("threads") = 0u,
        "Runs an INI config. Returns {'exit_code', 'manifest' (JSON text), 'csv' ({stem: text})}; "
        "writes the files too when out is given.");

  m.attr("__version__") = NMQ_VERSION;
}
