#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "platoon/config.hpp"
#include "platoon/errors.hpp"
#include "platoon/experiments.hpp"
#include "platoon/moe.hpp"
#include "platoon/report_io.hpp"
#include "platoon/simulation.hpp"
#include "platoon/stability.hpp"

namespace py = pybind11;
using namespace platoon;

namespace {

py::array_t<double> matrix(const SimulationTrace& tr, std::vector<double> VehicleSeries::*field) {
  const auto rows = static_cast<py::ssize_t>(tr.vehicles.size());
  const auto cols = static_cast<py::ssize_t>(tr.steps());
  py::array_t<double> out({rows, cols});
  auto m = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < rows; ++i) {
    const auto& src = tr.vehicles[static_cast<std::size_t>(i)].*field;
    for (py::ssize_t k = 0; k < cols; ++k) m(i, k) = src[static_cast<std::size_t>(k)];
  }
  return out;
}

py::dict summary_dict(const MoeSummary& m) {
  py::dict d;
  d["outflow"] = m.outflow;
  d["dr"] = m.dampening_ratio;
  for (const auto& [cat, total] : m.emissions) d[py::str(to_string(cat))] = total;
  d["tet"] = m.tet;
  d["tit"] = m.tit;
  d["jmax"] = m.max_jerk;
  d["overflow_samples"] = m.overflow_samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hybrid CTG/CS platoon simulation and string-stability analysis";

  // Translators run most-recent first, so subclasses register after the base.
  auto& base = py::register_exception<Error>(m, "PlatoonError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<MeasurementError>(m, "MeasurementError", base.ptr());

  py::class_<CtgParams>(m, "CtgParams")
      .def(py::init<>())
      .def_readwrite("k_s", &CtgParams::k_s)
      .def_readwrite("k_v", &CtgParams::k_v)
      .def_readwrite("k_a", &CtgParams::k_a)
      .def_readwrite("h", &CtgParams::h)
      .def_readwrite("g", &CtgParams::g);

  py::class_<CsParams>(m, "CsParams")
      .def(py::init<>())
      .def_readwrite("q1", &CsParams::q1)
      .def_readwrite("q3", &CsParams::q3)
      .def_readwrite("q4", &CsParams::q4)
      .def_readwrite("lam", &CsParams::lambda)
      .def_readwrite("g", &CsParams::g);

  py::class_<VehicleParams>(m, "VehicleParams")
      .def(py::init<>())
      .def_readwrite("phi", &VehicleParams::phi)
      .def_readwrite("length", &VehicleParams::length)
      .def_readwrite("standstill", &VehicleParams::standstill)
      .def_readwrite("sensor_delay", &VehicleParams::sensor_delay)
      .def_readwrite("comm_delay", &VehicleParams::comm_delay)
      .def_readwrite("leader_delay_per_hop", &VehicleParams::leader_delay_per_hop);

  py::enum_<PlatoonKind>(m, "PlatoonKind")
      .value("CS", PlatoonKind::CS)
      .value("CTG", PlatoonKind::CTG)
      .value("HYBRID", PlatoonKind::Hybrid);

  py::enum_<LeaderKind>(m, "LeaderKind")
      .value("CAV", LeaderKind::CAV)
      .value("AV_HDV", LeaderKind::AvHdv);

  py::class_<PlatoonConfig>(m, "PlatoonConfig")
      .def(py::init<>())
      .def_readwrite("kind", &PlatoonConfig::kind)
      .def_readwrite("n", &PlatoonConfig::n)
      .def_readwrite("r", &PlatoonConfig::r)
      .def_readwrite("ctg", &PlatoonConfig::ctg)
      .def_readwrite("h_follower", &PlatoonConfig::h_follower)
      .def_readwrite("cs", &PlatoonConfig::cs)
      .def_readwrite("vehicle", &PlatoonConfig::vehicle)
      .def_readwrite("exogenous_leader", &PlatoonConfig::exogenous_leader)
      .def_static("hybrid", &PlatoonConfig::hybrid, py::arg("n"))
      .def_static("cs_platoon", &PlatoonConfig::cs_platoon, py::arg("n"))
      .def_static("ctg_platoon", &PlatoonConfig::ctg_platoon, py::arg("n"), py::arg("r"));

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("duration", &Scenario::duration)
      .def_readwrite("v0", &Scenario::v0)
      .def_readwrite("amplitude", &Scenario::amplitude)
      .def_readwrite("period", &Scenario::period)
      .def_readwrite("active", &Scenario::active)
      .def_property_readonly("kind", [](const Scenario& s) { return to_string(s.kind); })
      .def_static("periodic", &Scenario::periodic)
      .def_static("decel_accel", &Scenario::decel_accel)
      .def_static("cruise", &Scenario::cruise, py::arg("v0"), py::arg("duration"))
      .def_static("custom", &Scenario::custom, py::arg("samples"), py::arg("duration"),
                  py::arg("v0"));

  m.def("exogenous_profile", &exogenous_profile, py::arg("scenario"), py::arg("t"));

  py::class_<SimulationTrace>(m, "SimulationTrace")
      .def_readonly("dt", &SimulationTrace::dt)
      .def_readonly("duration", &SimulationTrace::duration)
      .def_readonly("collision", &SimulationTrace::collision)
      .def_property_readonly("t", [](const SimulationTrace& tr) {
        return py::array_t<double>(static_cast<py::ssize_t>(tr.t.size()), tr.t.data());
      })
      .def_property_readonly("p", [](const SimulationTrace& tr) { return matrix(tr, &VehicleSeries::p); })
      .def_property_readonly("v", [](const SimulationTrace& tr) { return matrix(tr, &VehicleSeries::v); })
      .def_property_readonly("a", [](const SimulationTrace& tr) { return matrix(tr, &VehicleSeries::a); })
      .def_property_readonly("u", [](const SimulationTrace& tr) { return matrix(tr, &VehicleSeries::u); })
      .def_property_readonly("ds", [](const SimulationTrace& tr) { return matrix(tr, &VehicleSeries::ds); })
      .def("to_csv", [](const SimulationTrace& tr) {
        std::ostringstream out;
        write_trace_csv(out, tr);
        return out.str();
      });

  m.def("run", py::overload_cast<const PlatoonConfig&, const Scenario&, double>(&run),
        py::arg("config"), py::arg("scenario"), py::arg("dt") = 0.1,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_multi",
      [](const std::vector<PlatoonConfig>& cfgs, const Scenario& s, double dt) {
        return run_multi(cfgs, s, dt);
      },
      py::arg("configs"), py::arg("scenario"), py::arg("dt") = 0.1,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "summarize",
      [](const SimulationTrace& tr, const std::string& coefficients) {
        if (coefficients.empty()) return summary_dict(summarize(tr, nullptr));
        const VtMicroCoefficients c = load_vt_micro(coefficients);
        return summary_dict(summarize(tr, &c));
      },
      py::arg("trace"), py::arg("coefficients") = "");
  m.def("dampening_ratio", &dampening_ratio, py::arg("trace"));
  m.def("max_jerk", &max_jerk, py::arg("trace"));
  m.def("tet", &tet, py::arg("trace"), py::arg("ttc_star") = kTtcStar);
  m.def("tit", &tit, py::arg("trace"), py::arg("ttc_star") = kTtcStar);

  m.def(
      "stability_report",
      [](const CtgParams& ctg, const CsParams& cs, double phi, int platoon_size) {
        StabilityParams p{ctg, cs, phi};
        return stability_report_json(hybrid_verdict(ctg, cs, phi, {}, platoon_size), p);
      },
      py::arg("ctg") = CtgParams{}, py::arg("cs") = CsParams{}, py::arg("phi") = 0.5,
      py::arg("platoon_size") = 5, "Stability report as a JSON string");
  m.def("validate_stability_json", &validate_stability_json, py::arg("text"));

  m.def(
      "feasibility_scan",
      [](const std::string& x, double x_min, double x_max, int x_res, const std::string& y,
         double y_min, double y_max, int y_res, int jobs) {
        const ScanResult r = feasibility_scan({x, x_min, x_max, x_res}, {y, y_min, y_max, y_res},
                                              StabilityParams{}, {}, jobs);
        return sweep_csv(r);
      },
      py::arg("x"), py::arg("x_min"), py::arg("x_max"), py::arg("x_res"), py::arg("y"),
      py::arg("y_min"), py::arg("y_max"), py::arg("y_res"), py::arg("jobs") = 1,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "normalize_config",
      [](const std::string& text) { return emit_experiment(parse_experiment(text)); },
      py::arg("text"), "Parse a JSON config and re-emit it fully explicit");
}
