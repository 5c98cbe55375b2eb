#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gsc/errors.hpp"
#include "gsc/exit_time.hpp"
#include "gsc/extension.hpp"
#include "gsc/geometry.hpp"
#include "gsc/harness.hpp"
#include "gsc/resistance.hpp"

namespace py = pybind11;
using namespace gsc;

namespace {

BoundaryMode parse_mode(const std::string& mode) {
  if (mode == "face") return BoundaryMode::Face;
  if (mode == "cell") return BoundaryMode::Cell;
  throw InputError("mode must be 'face' or 'cell'");
}

py::dict axiom(const AxiomCheck& c) {
  py::dict d;
  d["pass"] = c.pass;
  d["witness"] = c.witness;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized Sierpinski carpet laboratory";
  m.attr("__version__") = GSC_VERSION;

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SizeLimitError>(m, "SizeLimitError", PyExc_MemoryError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);

  py::class_<GscPattern>(m, "Pattern")
      .def(py::init<int, int, std::vector<std::uint8_t>>(), py::arg("dim"), py::arg("scale"), py::arg("keep"))
      .def_static("standard_carpet", &GscPattern::standard_carpet)
      .def_static("full_cube", &GscPattern::full_cube, py::arg("dim"), py::arg("scale"))
      .def_static("menger_sponge", &GscPattern::menger_sponge)
      .def_static("from_removed", &GscPattern::from_removed, py::arg("dim"), py::arg("scale"), py::arg("removed"))
      .def_static("parse", &parse_pattern, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_pattern(path); }, py::arg("path"))
      .def_property_readonly("dim", &GscPattern::dim)
      .def_property_readonly("scale", &GscPattern::scale)
      .def_property_readonly("mass", &GscPattern::mass)
      .def_property_readonly("mask", &GscPattern::mask)
      .def("removed", &GscPattern::removed)
      .def("hash", &GscPattern::hash)
      .def("format", [](const GscPattern& p) { return format_pattern(p); })
      .def("__eq__", [](const GscPattern& a, const GscPattern& b) { return a == b; })
      .def("__repr__", [](const GscPattern& p) {
        return "Pattern(dim=" + std::to_string(p.dim()) + ", scale=" + std::to_string(p.scale()) +
               ", mass=" + std::to_string(p.mass()) + ")";
      });

  m.def("validate", [](const GscPattern& p) {
    const auto r = validate_pattern(p);
    py::dict d;
    d["symmetry"] = axiom(r.symmetry);
    d["connectedness"] = axiom(r.connectedness);
    d["non_diagonality"] = axiom(r.non_diagonality);
    d["borders"] = axiom(r.borders);
    d["valid"] = r.valid();
    d["degenerate"] = r.degenerate;
    d["first_failure"] = r.first_failure();
    return d;
  });

  m.def(
      "dims",
      [](const GscPattern& p, std::optional<double> rho) {
        auto r = dims(p);
        if (rho) attach_scaling(r, p, *rho);
        py::dict d;
        d["m_F"] = r.m_F;
        d["m_I"] = r.m_I;
        d["d_f"] = r.d_f;
        d["d_I"] = r.d_I;
        d["rho_hat"] = r.rho_hat;
        d["rhobar_hat"] = r.rhobar_hat;
        d["d_w_hat"] = r.dw_hat;
        d["d_s_hat"] = r.ds_hat;
        return d;
      },
      py::arg("pattern"), py::arg("rho") = py::none());

  m.def("cell_count", [](const GscPattern& p, int level) { return enumerate_cells(p, level).size(); },
        py::arg("pattern"), py::arg("level"));

  m.def(
      "raw_resistance",
      [](const GscPattern& p, int n, int m_prime, const std::string& mode, double tol) {
        ResistanceOptions opt;
        opt.mode = parse_mode(mode);
        opt.solve.tol = tol;
        py::gil_scoped_release release;
        return raw_resistance(p, n, m_prime, opt).D;
      },
      py::arg("pattern"), py::arg("n"), py::arg("m_prime"), py::arg("mode") = "face", py::arg("tol") = 1e-10);

  m.def(
      "resistance_series",
      [](const GscPattern& p, int n_max, int extra, const std::string& mode) {
        ResistanceOptions opt;
        opt.mode = parse_mode(mode);
        ResistanceSeries s;
        {
          py::gil_scoped_release release;
          s = resistance_series(p, n_max, extra, opt);
        }
        py::list rows;
        for (const auto& e : s.entries) {
          py::dict r;
          r["n"] = e.n;
          r["m_prime"] = e.m_prime;
          r["D"] = e.D;
          r["ratio"] = e.ratio;
          r["R_hat"] = e.R_hat;
          r["iterations"] = e.iterations;
          r["residual"] = e.residual;
          rows.append(r);
        }
        py::dict d;
        d["entries"] = rows;
        d["rho_hat"] = s.rho_hat;
        d["rho_regression"] = s.rho_regression;
        d["rhobar_hat"] = s.rhobar_hat;
        d["d_w_hat"] = s.dw_hat;
        d["d_s_hat"] = s.ds_hat;
        d["complete"] = s.complete;
        d["error"] = s.error;
        return d;
      },
      py::arg("pattern"), py::arg("n_max"), py::arg("extra") = 2, py::arg("mode") = "face");

  m.def(
      "exit_series",
      [](const GscPattern& p, int n_max, int extra, double rho) {
        ExitTimeSeries s;
        {
          py::gil_scoped_release release;
          s = exit_series(p, n_max, extra, rho);
        }
        py::list a;
        for (const auto& e : s.entries) a.append(e.a);
        py::dict d;
        d["a"] = a;
        d["c0_hat"] = s.c0_hat;
        d["rhobar_hat"] = s.rhobar_hat;
        d["complete"] = s.complete;
        return d;
      },
      py::arg("pattern"), py::arg("n_max"), py::arg("extra"), py::arg("rho"));

  m.def(
      "prescribe_averages",
      [](const GscPattern& p, int n, int depth, const std::vector<double>& targets, int m_prime) {
        PrescribedExtension pe = [&] {
          py::gil_scoped_release release;
          return prescribe_averages(p, n, depth, targets, m_prime);
        }();
        py::dict d;
        d["achieved"] = pe.achieved;
        d["quadrature_error"] = pe.quadrature_error;
        d["interior_residual"] = pe.interior_residual;
        d["energy"] = pe.solution.energy;
        return d;
      },
      py::arg("pattern"), py::arg("n"), py::arg("m"), py::arg("targets"), py::arg("m_prime"));

  m.def(
      "face_count", [](const GscPattern& p, int n, int depth) { return average_faces(p, n, depth).size(); },
      py::arg("pattern"), py::arg("n"), py::arg("m"));

  m.def(
      "run",
      [](const std::string& subcommand, const std::string& config_json) {
        const auto cfg = parse_config(nlohmann::json::parse(config_json));
        py::gil_scoped_release release;
        return run(subcommand, cfg);
      },
      py::arg("subcommand"), py::arg("config_json"),
      "Runs a CLI subcommand from a JSON config string; returns the exit status.");
}
