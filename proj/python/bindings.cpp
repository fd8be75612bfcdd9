// Python bindings. Structured results cross the boundary as JSON text and are
// decoded by the pure-Python wrapper in phg/__init__.py.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phg/acceptance.hpp"
#include "phg/error.hpp"
#include "phg/harness.hpp"
#include "phg/io.hpp"

namespace py = pybind11;
using phg::io::Json;

namespace {

phg::RunConfig configFor(double order, double x0, double xMin, std::size_t n, double tol, std::size_t maxIter) {
  phg::RunConfig cfg;
  cfg.order = order;
  cfg.x0 = x0;
  cfg.xMin = xMin;
  cfg.gridCount = n;
  cfg.picardTol = tol;
  cfg.maxIter = maxIter;
  return cfg;
}

std::string pipelineJson(const phg::PipelineResult& r) {
  Json j = phg::reportJson(r);
  j["coefficients_csv"] = phg::coefficientsCsv(r);
  j["remainders_csv"] = phg::remaindersCsv(r.report);
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polyhomogeneous expansions of the cusp model problem";

  static py::exception<phg::InputError> inputError(m, "InputError", PyExc_ValueError);
  static py::exception<phg::NumericalError> numericalError(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const phg::InputError& e) {
      py::set_error(inputError, e.what());
    } catch (const phg::NumericalError& e) {
      py::set_error(numericalError, e.what());
    }
  });

  m.def("roots", [](double lambda) { return phg::io::toJson(phg::characteristicRoots(lambda)).dump(); },
        py::arg("lambda_"));

  m.def("index_set",
        [](const std::string& model, double cutoff) {
          auto mp = phg::io::modelFromJson(Json::parse(model));
          return phg::io::toJson(phg::buildIndexSet(*mp, cutoff)).dump();
        },
        py::arg("model"), py::arg("cutoff"));

  m.def("index_set_from_generators",
        [](const std::vector<double>& generators, double cutoff) {
          return phg::io::toJson(phg::buildIndexSet(generators, cutoff)).dump();
        },
        py::arg("generators"), py::arg("cutoff"));

  m.def("expand",
        [](const std::string& model, const std::string& source, double order) {
          py::gil_scoped_release release;
          auto p = phg::problemFromJson(Json::parse(model), Json::parse(source), phg::indexCutoffFor(order));
          return phg::io::toJson(phg::formalExpansion(p, order)).dump();
        },
        py::arg("model"), py::arg("source"), py::arg("order"));

  m.def("expand_scenario",
        [](const std::string& name, double order) {
          auto p = phg::findScenario(name).build(phg::indexCutoffFor(order));
          return phg::io::toJson(phg::formalExpansion(p, order)).dump();
        },
        py::arg("name"), py::arg("order"));

  m.def("solve_mode_ode",
        [](double lambda, const std::function<double(double)>& forcing, double datum, double x0, double xMin,
           std::size_t n) {
          const phg::Grid grid = phg::makeGrid(x0, xMin, n);
          auto s = phg::solveModeODE(lambda, forcing, datum, grid);
          return std::make_pair(grid.points, s.values);
        },
        py::arg("lambda_"), py::arg("forcing"), py::arg("datum"), py::arg("x0") = 0.1, py::arg("xmin") = 1e-6,
        py::arg("n") = 512);

  m.def("run_scenario",
        [](const std::string& name, double order, double x0, double xMin, std::size_t n, double tol,
           std::size_t maxIter) {
          py::gil_scoped_release release;
          phg::RunConfig cfg = configFor(order, x0, xMin, n, tol, maxIter);
          cfg.scenario = name;
          return pipelineJson(phg::runPipeline(cfg));
        },
        py::arg("name"), py::arg("order") = 2.0, py::arg("x0") = 0.1, py::arg("xmin") = 1e-6, py::arg("n") = 512,
        py::arg("tol") = 1e-13, py::arg("max_iter") = 200);

  m.def("verify",
        [](const std::string& model, const std::string& source, double order, double x0, double xMin,
           std::size_t n, double tol, std::size_t maxIter) {
          py::gil_scoped_release release;
          const phg::RunConfig cfg = configFor(order, x0, xMin, n, tol, maxIter);
          auto p = phg::problemFromJson(Json::parse(model), Json::parse(source), phg::indexCutoffFor(order));
          return pipelineJson(phg::runProblem(cfg, std::move(p)));
        },
        py::arg("model"), py::arg("source"), py::arg("order") = 2.0, py::arg("x0") = 0.1, py::arg("xmin") = 1e-6,
        py::arg("n") = 512, py::arg("tol") = 1e-13, py::arg("max_iter") = 200);

  m.def("list_scenarios", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : phg::bundledScenarios()) out.emplace_back(s.name, s.description);
    return out;
  });

  m.def("acceptance",
        [](std::uint64_t seed, const std::vector<int>& only) {
          std::vector<phg::CriterionResult> rs;
          {
            py::gil_scoped_release release;
            rs = phg::runAcceptance(seed, only);
          }
          py::list out;
          for (const auto& r : rs) {
            py::dict d;
            d["id"] = r.id;
            d["title"] = r.title;
            d["pass"] = r.pass;
            d["detail"] = r.detail;
            d["seconds"] = r.seconds;
            d["line"] = phg::formatCriterion(r);
            out.append(d);
          }
          return out;
        },
        py::arg("seed") = 0, py::arg("only") = std::vector<int>{});
}
