#include "qins/experiments.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

py::list checks_to_list(const qins::ExperimentResult& r) {
  py::list out;
  for (const qins::Check& c : r.checks)
    out.append(py::dict(py::arg("name") = c.name, py::arg("pass") = c.pass,
                        py::arg("detail") = c.detail));
  return out;
}

qins::Mode parse_mode(const std::string& s) {
  if (s == "torus") return qins::Mode::Torus;
  if (s == "rect") return qins::Mode::NeumannRect;
  throw py::value_error("mode must be 'torus' or 'rect'");
}

}  // namespace

PYBIND11_MODULE(_qins, m) {
  m.doc() = "Spectral solver for a quasi-incompressible diffuse interface model";

  py::register_exception<qins::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<qins::Closures>(m, "Closures")
      .def(py::init<>())
      .def_readwrite("nu1", &qins::Closures::nu1)
      .def_readwrite("nu2", &qins::Closures::nu2)
      .def_readwrite("eta1", &qins::Closures::eta1)
      .def_readwrite("eta2", &qins::Closures::eta2);

  py::class_<qins::PhysParams>(m, "PhysParams")
      .def(py::init<>())
      .def_readwrite("alpha", &qins::PhysParams::alpha)
      .def_readwrite("beta", &qins::PhysParams::beta)
      .def_readwrite("epsilon", &qins::PhysParams::epsilon)
      .def_readwrite("eps0", &qins::PhysParams::eps0)
      .def_readwrite("closures", &qins::PhysParams::closures)
      .def("validate", &qins::PhysParams::validate)
      .def_static("from_densities", &qins::PhysParams::from_densities);

  py::class_<qins::Grid>(m, "Grid")
      .def(py::init([](const std::string& mode, double l1, double l2, int n1, int n2) {
             return qins::Grid(parse_mode(mode), l1, l2, n1, n2);
           }),
           py::arg("mode"), py::arg("l1"), py::arg("l2"), py::arg("n1"), py::arg("n2"))
      .def_property_readonly("shape", [](const qins::Grid& g) {
        return py::make_tuple(g.points(0), g.points(1));
      })
      .def_property_readonly("volume", &qins::Grid::volume);

  m.def("rho_hat", py::overload_cast<double, const qins::PhysParams&>(&qins::rho_hat),
        py::arg("c"), py::arg("params"));

  m.def(
      "spectrum_constant_coeff",
      [](const qins::PhysParams& p, double a0, const std::vector<double>& modes) {
        py::list out;
        for (const auto& r : qins::spectrum_constant_coeff(p, a0, modes))
          out.append(py::make_tuple(r.k2, r.plus, r.minus));
        return out;
      },
      py::arg("params"), py::arg("a0"), py::arg("modes"));

  m.def(
      "spectrum_numeric",
      [](const qins::Grid& g, const qins::PhysParams& p, double a0) {
        return Eigen::VectorXcd(
            qins::spectrum_numeric(qins::LinearizedCoefficients::constant_a0(g, p, a0)));
      },
      py::arg("grid"), py::arg("params"), py::arg("a0"));

  m.def("ray_angle", [](const Eigen::VectorXcd& eig) { return qins::ray_angle(eig); });

  m.def(
      "check_h1_h2",
      [](const qins::Grid& g, const qins::PhysParams& p, double a0) {
        const auto r = qins::check_H1_H2(qins::LinearizedCoefficients::constant_a0(g, p, a0));
        return py::dict(py::arg("symmetry_err_A") = r.symmetry_err_A,
                        py::arg("symmetry_err_B") = r.symmetry_err_B,
                        py::arg("min_eig_A") = r.min_eig_A, py::arg("min_eig_B") = r.min_eig_B,
                        py::arg("rho1") = r.rho1, py::arg("rho2") = r.rho2);
      },
      py::arg("grid"), py::arg("params"), py::arg("a0"));

  m.def("parse_config", [](const std::string& text) {
    const qins::RunConfig c = qins::parse_config_string(text);
    return py::dict(py::arg("n1") = c.n1, py::arg("n2") = c.n2, py::arg("dt") = c.dt,
                    py::arg("total") = c.total, py::arg("alpha") = c.params.alpha,
                    py::arg("beta") = c.params.beta, py::arg("epsilon") = c.params.epsilon,
                    py::arg("init_kind") = c.init_kind, py::arg("output_dir") = c.output_dir);
  });

  m.def("run_spectrum", [](const std::string& text) {
    const auto out = qins::run_spectrum(qins::parse_config_string(text));
    return py::dict(py::arg("pass") = out.result.pass(), py::arg("checks") = checks_to_list(out.result),
                    py::arg("max_rel_err") = out.max_rel_err, py::arg("overdamped") = out.overdamped,
                    py::arg("sweep_a0") = out.sweep_a0, py::arg("sweep_angle") = out.sweep_angle);
  });

  m.def("run_lincheck", [](const std::string& text) {
    const auto out = qins::run_lincheck(qins::parse_config_string(text));
    return py::dict(py::arg("pass") = out.result.pass(), py::arg("checks") = checks_to_list(out.result),
                    py::arg("rho1") = out.h12.rho1, py::arg("rho2") = out.h12.rho2,
                    py::arg("spectral_angle") = out.spectral_angle);
  });

  m.def(
      "run_simulate",
      [](const std::string& text, bool write_outputs) {
        const auto out = qins::run_simulate(qins::parse_config_string(text), write_outputs);
        py::list mass, energy;
        for (const auto& r : out.diagnostics) {
          mass.append(r.mass);
          energy.append(r.e_total);
        }
        return py::dict(py::arg("pass") = out.result.pass(),
                        py::arg("checks") = checks_to_list(out.result),
                        py::arg("completed") = out.sim.completed,
                        py::arg("steps") = out.sim.traj.states.size() - 1,
                        py::arg("mass_drift") = out.mass_drift, py::arg("mass") = mass,
                        py::arg("e_total") = energy);
      },
      py::arg("config"), py::arg("write_outputs") = false);

  m.def("run_contraction", [](const std::string& text) {
    const auto out = qins::run_contraction(qins::parse_config_string(text));
    py::list rows;
    for (const auto& r : out.rows)
      rows.append(py::dict(py::arg("window_T") = r.window_T, py::arg("converged") = r.converged,
                           py::arg("iterations") = r.iterations, py::arg("q_hat") = r.q_hat));
    return py::dict(py::arg("pass") = out.result.pass(), py::arg("checks") = checks_to_list(out.result),
                    py::arg("rows") = rows);
  });
}
