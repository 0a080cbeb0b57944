#include "morozov/pde.hpp"

#include "morozov/interpolation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace morozov::pde {

void PdeParams::validate() const {
  if (!(0.0 < bounds.lower && bounds.lower <= bounds.upper && std::isfinite(bounds.upper)))
    throw std::invalid_argument("coefficient bounds need 0 < a1 <= a2 < inf");
  if (a0 < bounds.lower || a0 > bounds.upper)
    throw std::invalid_argument("prior coefficient a0 outside [a1, a2]");
}

double true_sigma(double tau, double y) {
  if (-0.4 <= y && y <= 0.4)
    return 0.4 - 0.16 * std::exp(-tau / 2.0) * std::cos(4.0 * std::numbers::pi * y / 5.0);
  return 0.4;
}

double true_coefficient_value(double tau, double y) {
  const double s = true_sigma(tau, y);
  return 0.5 * s * s;
}

Field true_coefficient(const Grid& grid) { return Field::sample(grid, true_coefficient_value); }

double initial_condition(double y) { return std::max(0.0, 1.0 - std::exp(y)); }

namespace {

// Thomas algorithm; `diag` and `rhs` are overwritten.
void thomas(const std::vector<double>& lower, std::vector<double>& diag,
            const std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t j = 1; j < n; ++j) {
    const double m = lower[j] / diag[j - 1];
    diag[j] -= m * upper[j - 1];
    rhs[j] -= m * rhs[j - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) rhs[j] = (rhs[j] - upper[j] * rhs[j + 1]) / diag[j];
}

Field coefficient_on(const Field& a, const Grid& grid) {
  if (!a.is_surface()) throw std::invalid_argument("coefficient must be a surface");
  return interpolate(a, grid);
}

struct ForwardStates {
  Field a;  // coefficient on the solver grid
  Field u;
};

ForwardStates run_forward(const Field& a, const PdeParams& params, const Grid& grid) {
  params.validate();
  grid.validate();
  if (grid.ny < 3) throw std::invalid_argument("solver grid needs an interior node");
  Field a_grid = coefficient_on(a, grid);
  const CnSystem cn(grid, params.b);
  const std::size_t ny = grid.ny;

  Eigen::VectorXd u(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < ny; ++j) u[static_cast<Eigen::Index>(j)] = initial_condition(grid.y(j));
  u[0] = 1.0;
  u[static_cast<Eigen::Index>(ny - 1)] = 0.0;

  std::vector<double> lower(ny), diag(ny), upper(ny), rhs(ny);
  const double* av = a_grid.values().data();
  for (std::size_t n = 0; n + 1 < grid.nt; ++n) {
    cn.apply_rhs(av + n * ny, u.data() + n * ny, rhs.data());
    cn.assemble_lhs(av + (n + 1) * ny, lower, diag, upper);
    thomas(lower, diag, upper, rhs);
    for (std::size_t j = 0; j < ny; ++j) u[static_cast<Eigen::Index>((n + 1) * ny + j)] = rhs[j];
  }
  return {std::move(a_grid), Field::surface(grid, std::move(u))};
}

// Euclidean partials of J with respect to the solver-grid coefficient, given
// the partials `source` of J with respect to every state value.
Eigen::VectorXd adjoint_sweep(const ForwardStates& st, const Eigen::VectorXd& source,
                              const PdeParams& params) {
  const Grid& grid = st.u.grid();
  const CnSystem cn(grid, params.b);
  const std::size_t ny = grid.ny;
  const std::size_t nt = grid.nt;
  const double* av = st.a.values().data();
  const double* uv = st.u.values().data();

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  std::vector<double> mu_next(ny, 0.0), mu(ny), rhs(ny), lower(ny), diag(ny), upper(ny);
  std::vector<double> lt_lower(ny), lt_upper(ny);

  for (std::size_t n = nt - 1; n >= 1; --n) {
    for (std::size_t j = 0; j < ny; ++j) rhs[j] = source[static_cast<Eigen::Index>(n * ny + j)];
    if (n + 1 < nt) {
      std::vector<double> tmp(ny);
      cn.apply_rhs_transpose(av + n * ny, mu_next.data(), tmp.data());
      for (std::size_t j = 0; j < ny; ++j) rhs[j] += tmp[j];
    }
    // Solve L_n^T mu = rhs.
    cn.assemble_lhs(av + n * ny, lower, diag, upper);
    for (std::size_t j = 0; j < ny; ++j) {
      lt_lower[j] = j > 0 ? upper[j - 1] : 0.0;
      lt_upper[j] = j + 1 < ny ? lower[j + 1] : 0.0;
    }
    thomas(lt_lower, diag, lt_upper, rhs);
    mu = rhs;

    // Contributions of row n through L_n and through R_n (into step n+1).
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double sens = cn.coefficient_sensitivity(uv + n * ny, j);
      double g = mu[j] * sens;
      if (n + 1 < nt) g += mu_next[j] * sens;
      grad[static_cast<Eigen::Index>(n * ny + j)] = g;
    }
    mu_next = mu;
  }
  // Row 0 only enters through R_0.
  for (std::size_t j = 1; j + 1 < ny; ++j)
    grad[static_cast<Eigen::Index>(j)] = mu_next[j] * cn.coefficient_sensitivity(uv, j);
  return grad;
}

// Chains solver-grid partials back to the coefficient's own grid and applies
// the Riesz map of that grid.
Field pull_back(const Field& a, const Grid& grid, const Eigen::VectorXd& solver_partials) {
  if (a.grid() == grid) return riesz_gradient(a, solver_partials);
  const BilinearTransfer transfer(a.grid(), grid);
  return riesz_gradient(a, transfer.apply_transpose(solver_partials));
}

}  // namespace

CnSystem::CnSystem(const Grid& grid, double b)
    : grid_(grid), b_(b), eta_(grid.dt / (grid.dy * grid.dy)), ratio_(grid.dt / grid.dy) {}

void CnSystem::assemble_lhs(const double* a_row, std::vector<double>& lower,
                            std::vector<double>& diag, std::vector<double>& upper) const {
  const std::size_t ny = grid_.ny;
  lower.assign(ny, 0.0);
  diag.assign(ny, 1.0);
  upper.assign(ny, 0.0);
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    const double s = 0.5 * eta_ * a_row[j];
    const double v = 0.25 * ratio_ * (a_row[j] - b_);
    lower[j] = -s - v;
    diag[j] = 1.0 + 2.0 * s;
    upper[j] = -s + v;
    if (std::abs(lower[j]) + std::abs(upper[j]) > std::abs(diag[j])) {
      std::ostringstream os;
      os << "Crank-Nicolson matrix not diagonally dominant at node " << j << " (a = " << a_row[j]
         << ", eta = dt/dy^2 = " << eta_ << ", dt/dy = " << ratio_
         << "); reduce dt relative to dy";
      throw std::domain_error(os.str());
    }
  }
}

void CnSystem::apply_rhs(const double* a_row, const double* u, double* out) const {
  const std::size_t ny = grid_.ny;
  out[0] = 1.0;
  out[ny - 1] = 0.0;
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    const double s = 0.5 * eta_ * a_row[j];
    const double v = 0.25 * ratio_ * (a_row[j] - b_);
    out[j] = (s + v) * u[j - 1] + (1.0 - 2.0 * s) * u[j] + (s - v) * u[j + 1];
  }
}

void CnSystem::apply_rhs_transpose(const double* a_row, const double* mu, double* out) const {
  const std::size_t ny = grid_.ny;
  for (std::size_t k = 0; k < ny; ++k) out[k] = 0.0;
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    const double s = 0.5 * eta_ * a_row[j];
    const double v = 0.25 * ratio_ * (a_row[j] - b_);
    out[j - 1] += (s + v) * mu[j];
    out[j] += (1.0 - 2.0 * s) * mu[j];
    out[j + 1] += (s - v) * mu[j];
  }
}

double CnSystem::coefficient_sensitivity(const double* u, std::size_t j) const {
  return 0.5 * eta_ * (u[j + 1] - 2.0 * u[j] + u[j - 1]) - 0.25 * ratio_ * (u[j + 1] - u[j - 1]);
}

Field solve_forward(const Field& a, const PdeParams& params, const Grid& grid) {
  return run_forward(a, params, grid).u;
}

Field forward_operator(const Field& a, const PdeParams& params, const Grid& grid) {
  return solve_forward(a, params, grid) - solve_forward(Field::constant(grid, params.a0), params, grid);
}

Field misfit_gradient(const Field& a, const Field& udelta, const PdeParams& params,
                      const Grid& grid, double p) {
  const ForwardStates st = run_forward(a, params, grid);
  const Field r = st.u - udelta;
  const double res = norm(r);
  if (res == 0.0) return Field::zeros_like(a);
  const double scale = p * std::pow(res, p - 2.0);
  const Eigen::VectorXd source = scale * r.weights().cwiseProduct(r.values());
  return pull_back(a, grid, adjoint_sweep(st, source, params));
}

PdeForwardModel::PdeForwardModel(PdeParams params, Grid solver_grid)
    : params_(params), grid_(solver_grid) {
  params_.validate();
  grid_.validate();
  u_prior_ = solve_forward(Field::constant(grid_, params_.a0), params_, grid_);
}

Field PdeForwardModel::apply(const Field& a) const {
  return solve_forward(a, params_, grid_) - u_prior_;
}

Field PdeForwardModel::adjoint_derivative(const Field& a, const Field& r) const {
  if (!r.is_surface() || r.grid() != grid_)
    throw std::invalid_argument("adjoint input must live on the solver grid");
  const ForwardStates st = run_forward(a, params_, grid_);
  const Eigen::VectorXd source = r.weights().cwiseProduct(r.values());
  return pull_back(a, grid_, adjoint_sweep(st, source, params_));
}

MisfitEvaluation PdeForwardModel::misfit(const Field& a, const Field& ydelta, double p,
                                         bool with_gradient) const {
  if (!ydelta.is_surface() || ydelta.grid() != grid_)
    throw std::invalid_argument("data must live on the solver grid " + grid_.describe());
  const ForwardStates st = run_forward(a, params_, grid_);
  const Field r = (st.u - u_prior_) - ydelta;
  MisfitEvaluation out;
  out.residual = norm(r);
  out.value = std::pow(out.residual, p);
  if (with_gradient) {
    if (out.residual == 0.0) {
      out.gradient = Field::zeros_like(a);
    } else {
      const double scale = p * std::pow(out.residual, p - 2.0);
      const Eigen::VectorXd source = scale * r.weights().cwiseProduct(r.values());
      out.gradient = pull_back(a, grid_, adjoint_sweep(st, source, params_));
    }
  }
  return out;
}

Field PdeForwardModel::data_from_observation(const Field& udelta) const {
  return interpolate(udelta, grid_) - u_prior_;
}

}  // namespace morozov::pde
