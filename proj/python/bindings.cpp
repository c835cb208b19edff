#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "adcg/bench/experiment.hpp"
#include "adcg/bench/metrics.hpp"
#include "adcg/fcstep.hpp"
#include "adcg/loss.hpp"
#include "adcg/measure.hpp"
#include "adcg/models/lti.hpp"
#include "adcg/models/matcomp.hpp"
#include "adcg/models/superres.hpp"
#include "adcg/models/toy.hpp"
#include "adcg/solver.hpp"

namespace py = pybind11;
using namespace adcg;

namespace {

AtomicMeasure measure_from_lists(const std::vector<ParameterPoint>& support, const Vector& weights) {
  return make_measure(support, weights);
}

std::vector<bench::Source> sources_from_rows(const Matrix& rows) {
  if (rows.size() > 0 && rows.cols() < 2) throw std::invalid_argument("source arrays need columns x, y[, weight]");
  std::vector<bench::Source> out;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out.push_back({rows(i, 0), rows(i, 1), rows.cols() > 2 ? rows(i, 2) : 1.0});
  return out;
}

}  // namespace

PYBIND11_MODULE(_adcg, m) {
  m.doc() = "Alternating descent conditional gradient over atomic measures";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::enum_<Variant>(m, "Variant")
      .value("CGM_M", Variant::CGM_M)
      .value("ADCG", Variant::ADCG)
      .value("GF", Variant::GF);

  py::class_<AtomicMeasure>(m, "AtomicMeasure")
      .def(py::init<>())
      .def(py::init(&measure_from_lists), py::arg("support"), py::arg("weights"))
      .def_property_readonly("weights", &AtomicMeasure::weights)
      .def_property_readonly("support", &AtomicMeasure::support)
      .def("total_mass", &AtomicMeasure::total_mass)
      .def("__len__", &AtomicMeasure::size)
      .def("__repr__", [](const AtomicMeasure& mu) { return "<AtomicMeasure with " + std::to_string(mu.size()) + " atoms>"; });

  py::class_<ForwardModel>(m, "ForwardModel")
      .def_property_readonly("output_dim", &ForwardModel::output_dim)
      .def_property_readonly("param_dim", &ForwardModel::param_dim)
      .def("psi", &ForwardModel::psi, py::arg("theta"))
      .def("jacobian", &ForwardModel::jacobian, py::arg("theta"))
      .def("lmo", &ForwardModel::lmo, py::arg("v"))
      .def("box", [](const ForwardModel& model) {
        std::vector<std::pair<double, double>> out;
        for (const auto& b : model.box()) out.emplace_back(b.lo, b.hi);
        return out;
      });

  py::class_<models::MomentCurveModel, ForwardModel>(m, "MomentCurveModel")
      .def(py::init<int, double, double>(), py::arg("degree"), py::arg("lo"), py::arg("hi"));

  py::class_<models::SuperresModel, ForwardModel>(m, "SuperresModel")
      .def(py::init([](int grid_w, int grid_h, double pixel_size, double sigma) {
             models::SuperresParams p;
             p.grid_w = grid_w;
             p.grid_h = grid_h;
             p.pixel_size = pixel_size;
             p.sigma = sigma;
             return models::SuperresModel(p);
           }),
           py::arg("grid_w") = 64, py::arg("grid_h") = 64, py::arg("pixel_size") = 100.0, py::arg("sigma") = 100.0);

  py::class_<models::LtiModel, ForwardModel>(m, "LtiModel")
      .def(py::init([](const Vector& input, int r_grid, int alpha_grid) {
             models::LtiParams p;
             p.r_grid = r_grid;
             p.alpha_grid = alpha_grid;
             return models::LtiModel(input, p);
           }),
           py::arg("input"), py::arg("r_grid") = 50, py::arg("alpha_grid") = 50);

  py::class_<models::MatCompModel, ForwardModel>(m, "MatCompModel")
      .def(py::init([](int rows, int cols, const std::vector<std::pair<int, int>>& entries) {
             std::vector<models::Entry> omega;
             for (const auto& [i, j] : entries) omega.push_back({i, j});
             return models::MatCompModel(rows, cols, std::move(omega));
           }),
           py::arg("rows"), py::arg("cols"), py::arg("entries"))
      .def("pack", &models::MatCompModel::pack, py::arg("u"), py::arg("v"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("variant", &SolverConfig::variant)
      .def_readwrite("tau", &SolverConfig::tau)
      .def_readwrite("max_outer_iters", &SolverConfig::max_outer_iters)
      .def_readwrite("gap_tolerance", &SolverConfig::gap_tolerance)
      .def_readwrite("max_inner_passes", &SolverConfig::max_inner_passes)
      .def_readwrite("local_descent_steps", &SolverConfig::local_descent_steps)
      .def_readwrite("stagewise_threshold", &SolverConfig::stagewise_threshold);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("measure", &SolveResult::measure)
      .def_readonly("objective_trace", &SolveResult::objective_trace)
      .def_readonly("gap_trace", &SolveResult::gap_trace)
      .def_readonly("support_trace", &SolveResult::support_trace)
      .def_readonly("lower_bound", &SolveResult::lower_bound)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("weight_solver_warning", &SolveResult::weight_solver_warning)
      .def_property_readonly("termination", [](const SolveResult& r) { return to_string(r.termination); });

  m.def(
      "run",
      [](const ForwardModel& model, const Vector& y, const SolverConfig& config) {
        const SquaredLoss loss;
        py::gil_scoped_release release;
        return run(model, y, loss, config);
      },
      py::arg("model"), py::arg("y"), py::arg("config") = SolverConfig{},
      "Runs the solver with the squared loss 0.5 ||Phi mu - y||^2.");

  m.def(
      "solve_weights",
      [](const Matrix& a, const Vector& y, double tau) {
        const SquaredLoss loss;
        const WeightSolution sol = solve_weights({a, y, tau, loss});
        return py::make_tuple(sol.w, sol.objective);
      },
      py::arg("A"), py::arg("y"), py::arg("tau"),
      "min 0.5 ||A w - y||^2 over w >= 0, sum(w) <= tau; returns (w, objective).");

  m.def("apply_forward", &apply_forward, py::arg("model"), py::arg("measure"));
  m.def("caratheodory_prune", &caratheodory_prune, py::arg("model"), py::arg("measure"));

  m.def(
      "match_sources",
      [](const Matrix& est, const Matrix& truth, double radius) {
        const auto e = sources_from_rows(est);
        const auto t = sources_from_rows(truth);
        const bench::MatchScore s = bench::match_sources(e, t, radius);
        py::dict out;
        out["precision"] = s.precision;
        out["recall"] = s.recall;
        out["f1"] = s.f1;
        out["matches"] = s.matches;
        return out;
      },
      py::arg("est"), py::arg("truth"), py::arg("radius"));
  m.def("sysid_score", &bench::sysid_score, py::arg("pred"), py::arg("test"));

  m.def(
      "run_experiment",
      [](const std::string& config_path) {
        std::ostringstream log, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = bench::run_experiment(config_path, log, err);
        }
        return py::make_tuple(code, log.str(), err.str());
      },
      py::arg("config_path"), "Runs a config file; returns (exit_code, log, error_json).");
}
