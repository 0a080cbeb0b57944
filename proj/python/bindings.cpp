#include "morozov/diagnostics.hpp"
#include "morozov/experiment.hpp"
#include "morozov/linear_testbed.hpp"
#include "morozov/pde.hpp"
#include "morozov/synthdata.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace morozov;

namespace {

// Surfaces cross the boundary as (nt, ny) arrays.
Eigen::MatrixXd as_matrix(const Field& f) {
  if (!f.is_surface()) return f.values();
  const Grid& g = f.grid();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(g.nt), static_cast<Eigen::Index>(g.ny));
  for (std::size_t i = 0; i < g.nt; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.at(i, j);
  return m;
}

Field surface_from(const Grid& g, const Eigen::MatrixXd& m) {
  if (static_cast<std::size_t>(m.rows()) != g.nt || static_cast<std::size_t>(m.cols()) != g.ny)
    throw std::invalid_argument("array shape must be (nt, ny) = (" + std::to_string(g.nt) + ", " +
                                std::to_string(g.ny) + ")");
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.nt; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      v[static_cast<Eigen::Index>(g.index(i, j))] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return Field::surface(g, v);
}

MinimizerSettings settings(std::size_t max_iters, double rel_tol, double grad_tol) {
  MinimizerSettings s;
  s.stop.max_iters = max_iters;
  s.stop.rel_residual_tol = rel_tol;
  s.stop.gradient_tol = grad_tol;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tikhonov regularization with discrepancy-based parameter choice";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<Grid>(m, "Grid")
      .def_static("from_steps", &Grid::from_steps, py::arg("dt"), py::arg("dy"), py::arg("t_min") = 0.0,
                  py::arg("t_max") = 1.0, py::arg("y_min") = -5.0, py::arg("y_max") = 5.0)
      .def_static("from_counts", &Grid::from_counts, py::arg("nt"), py::arg("ny"), py::arg("t_min") = 0.0,
                  py::arg("t_max") = 1.0, py::arg("y_min") = -5.0, py::arg("y_max") = 5.0)
      .def_readonly("nt", &Grid::nt)
      .def_readonly("ny", &Grid::ny)
      .def_readonly("dt", &Grid::dt)
      .def_readonly("dy", &Grid::dy)
      .def_property_readonly("shape", [](const Grid& g) { return py::make_tuple(g.nt, g.ny); })
      .def("t", &Grid::t)
      .def("y", &Grid::y)
      .def("__eq__", [](const Grid& a, const Grid& b) { return a == b; })
      .def("__repr__", &Grid::describe);

  py::class_<DiscrepancyBand>(m, "DiscrepancyBand")
      .def(py::init<>())
      .def_static("make", &DiscrepancyBand::make, py::arg("tau"), py::arg("lam"), py::arg("tau2"))
      .def_readwrite("tau", &DiscrepancyBand::tau)
      .def_readwrite("lam", &DiscrepancyBand::lambda)
      .def_readwrite("tau1", &DiscrepancyBand::tau1)
      .def_readwrite("tau2", &DiscrepancyBand::tau2)
      .def_readwrite("epsilon", &DiscrepancyBand::epsilon)
      .def("validate", &DiscrepancyBand::validate);
  m.def("check_band", &check_band, py::arg("residual"), py::arg("delta"), py::arg("band") = DiscrepancyBand{});

  m.def("closed_form_minimizer", &closed_form_minimizer, py::arg("a"), py::arg("ydelta"), py::arg("alpha"),
        py::arg("x0"));

  m.def(
      "minimize_quadratic",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& yd, double alpha, const Eigen::VectorXd& x0,
         std::size_t max_iters, double grad_tol) {
        const MatrixModel model(a);
        const MinimizerSettings s = settings(max_iters, 0.0, grad_tol);
        const TikhonovConfig cfg{alpha, 2.0, Penalty::quadratic(Field::vector(x0))};
        const RegularizedSolution sol = minimize_tikhonov(model, Field::vector(yd), cfg, s.wolfe, s.stop);
        return py::dict(py::arg("x") = sol.x.values(), py::arg("residual") = sol.residual,
                        py::arg("iterations") = sol.iterations,
                        py::arg("stop_reason") = to_string(sol.stop_reason));
      },
      "Minimizes ||A x - y||^2 + alpha ||x - x0||^2 by projected steepest descent.", py::arg("a"),
      py::arg("ydelta"), py::arg("alpha"), py::arg("x0"), py::arg("max_iters") = 1000000,
      py::arg("gradient_tol") = 1e-13);

  m.def(
      "sequential_discrepancy",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& yd, double tau_tilde, double alpha0, double q,
         std::size_t kmax, double delta) {
        const MatrixModel model(a);
        const auto n = static_cast<std::size_t>(a.cols());
        const auto ladder = DiscretizationLadder::coordinates(n, {n});
        const Penalty pen = Penalty::quadratic(Field::vector(Eigen::VectorXd::Zero(a.cols())));
        const SequentialResult r = sequential_discrepancy(model, Field::vector(yd), pen, 2.0, ladder, 0,
                                                          tau_tilde, alpha0, q, kmax, delta,
                                                          settings(1000000, 0.0, 1e-13));
        py::list trace;
        for (const auto& p : r.trace) trace.append(py::make_tuple(p.alpha, p.residual));
        return py::dict(py::arg("exhausted") = r.exhausted, py::arg("k") = r.k, py::arg("alpha") = r.alpha,
                        py::arg("trace") = trace);
      },
      py::arg("a"), py::arg("ydelta"), py::arg("tau_tilde"), py::arg("alpha0"), py::arg("q"), py::arg("kmax"),
      py::arg("delta"));

  m.def(
      "morozov_alpha",
      [](const Eigen::MatrixXd& a, const Eigen::VectorXd& yd, double delta, const DiscrepancyBand& band) {
        const MatrixModel model(a);
        const auto n = static_cast<std::size_t>(a.cols());
        const auto ladder = DiscretizationLadder::coordinates(n, {n});
        const Penalty pen = Penalty::quadratic(Field::vector(Eigen::VectorXd::Zero(a.cols())));
        AlphaSearchOptions opts;
        opts.minimizer = settings(1000000, 0.0, 1e-13);
        const MorozovResult r =
            morozov_alpha_search(model, Field::vector(yd), pen, 2.0, band, ladder, 0, delta, 0.0, opts);
        py::dict out(py::arg("status") = to_string(r.status), py::arg("alpha") = r.alpha,
                     py::arg("diagnostics") = r.diagnostics);
        if (r.solution) {
          out["x"] = r.solution->x.values();
          out["residual"] = r.solution->residual;
        }
        return out;
      },
      "Bisection on log alpha for tau1 delta <= residual <= tau2 delta.", py::arg("a"), py::arg("ydelta"),
      py::arg("delta"), py::arg("band") = DiscrepancyBand{});

  py::module_ pde = m.def_submodule("pde", "Crank-Nicolson forward model");
  pde.def("true_sigma", &pde::true_sigma, py::arg("tau"), py::arg("y"));
  pde.def("initial_condition", &pde::initial_condition, py::arg("y"));
  pde.def("true_coefficient", [](const Grid& g) { return as_matrix(pde::true_coefficient(g)); }, py::arg("grid"));
  pde.def(
      "solve",
      [](const Grid& coef_grid, const Eigen::MatrixXd& a, const Grid& grid, double b) {
        pde::PdeParams p;
        p.b = b;
        return as_matrix(pde::solve_forward(surface_from(coef_grid, a), p, grid));
      },
      "Solves on `grid` with the coefficient array `a` sampled on `coef_grid`.", py::arg("coef_grid"),
      py::arg("a"), py::arg("grid"), py::arg("b") = 0.03);
  pde.def(
      "misfit_gradient",
      [](const Grid& g, const Eigen::MatrixXd& a, const Eigen::MatrixXd& ud, double b) {
        pde::PdeParams p;
        p.b = b;
        return as_matrix(pde::misfit_gradient(surface_from(g, a), surface_from(g, ud), p, g));
      },
      py::arg("grid"), py::arg("a"), py::arg("udelta"), py::arg("b") = 0.03);

  py::module_ data = m.def_submodule("synthdata", "Noisy data and the noise-level estimate");
  data.def("simpson_2d", [](const Grid& g, const Eigen::MatrixXd& u) { return simpson_2d(surface_from(g, u)).value; },
           py::arg("grid"), py::arg("u"));
  data.def(
      "estimate_noise_level",
      [](const Grid& fine, const Eigen::MatrixXd& clean, const Grid& coarse, const Eigen::MatrixXd& noisy,
         const std::string& where) {
        return estimate_noise_level(surface_from(fine, clean), surface_from(coarse, noisy),
                                    noise_evaluation_from_string(where));
      },
      py::arg("fine_grid"), py::arg("clean"), py::arg("coarse_grid"), py::arg("noisy"),
      py::arg("where") = "data-nodes");
  data.def(
      "generate",
      [](const Grid& fine, const Grid& coarse, double noise_std, std::uint64_t seed) {
        const NoisyDataset d = generate_data(pde::true_coefficient(fine), pde::PdeParams{}, fine, coarse,
                                             noise_std, seed);
        return py::dict(py::arg("u_delta") = as_matrix(d.u_delta), py::arg("u_clean") = as_matrix(d.u_clean_fine),
                        py::arg("delta") = d.delta);
      },
      "Data from the true coefficient on `fine`, noise added there and interpolated to `coarse`.",
      py::arg("fine_grid"), py::arg("coarse_grid"), py::arg("noise_std") = 0.01, py::arg("seed") = 1);

  m.def("loglog_slope", &loglog_slope, py::arg("x"), py::arg("y"));

  m.def(
      "validate_config", [](const std::filesystem::path& p) { return load_experiment_config(p).to_text(); },
      "Effective configuration text with defaults resolved.", py::arg("path"));
  m.def(
      "run_experiment",
      [](const std::filesystem::path& p, const std::filesystem::path& out) {
        const ExperimentConfig cfg = load_experiment_config(p);
        py::gil_scoped_release release;
        return run_experiment_to(cfg, out);
      },
      "Runs the configured experiment and returns the CLI exit status.", py::arg("config"), py::arg("out"));
}
