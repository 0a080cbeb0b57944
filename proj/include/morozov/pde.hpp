#pragma once

#include "morozov/forward_model.hpp"

#include <vector>

namespace morozov::pde {

/// Coefficients of u_t = a (u_yy - u_y) + b u_y on [0,1] x [-5,5] with
/// u(0,y) = max(0, 1 - e^y), u(t,-5) = 1, u(t,5) = 0.
struct PdeParams {
  double b = 0.03;
  double a0 = 0.08;  ///< constant prior coefficient
  Box bounds{0.005, 1.0};

  void validate() const;
};

/// sigma(t, y) = 2/5 - 4/25 e^{-t/2} cos(4 pi y / 5) for |y| <= 2/5, else 2/5.
double true_sigma(double tau, double y);
/// a = sigma^2 / 2.
double true_coefficient_value(double tau, double y);
Field true_coefficient(const Grid& grid);

/// max(0, 1 - e^y)
double initial_condition(double y);

/// Crank-Nicolson stencil for one grid. Interior row j of the implicit side:
///   u_j - (eta a_j / 2)(u_{j+1} - 2u_j + u_{j-1}) + (r a_j - r b)/4 (u_{j+1} - u_{j-1})
/// with eta = dt/dy^2 and r = dt/dy; the explicit side flips both signs.
class CnSystem {
 public:
  explicit CnSystem(const Grid& grid, double b);

  double eta() const { return eta_; }
  double mesh_ratio() const { return ratio_; }
  const Grid& grid() const { return grid_; }

  /// Implicit-side tridiagonal for one time row of coefficients (boundary rows
  /// are the identity). Throws std::domain_error when an interior row is not
  /// diagonally dominant.
  void assemble_lhs(const double* a_row, std::vector<double>& lower, std::vector<double>& diag,
                    std::vector<double>& upper) const;

  /// Explicit side applied to u (boundary entries set to the Dirichlet values).
  void apply_rhs(const double* a_row, const double* u, double* out) const;

  /// Transpose of the explicit side (boundary rows zero) applied to mu.
  void apply_rhs_transpose(const double* a_row, const double* mu, double* out) const;

  /// d/da_j of the explicit row applied to u: (eta/2) d2u_j - (r/4) du_j.
  double coefficient_sensitivity(const double* u, std::size_t j) const;

 private:
  Grid grid_;
  double b_;
  double eta_;
  double ratio_;
};

/// Solves the forward problem. `a` may live on any grid covering the solver
/// grid's extents; it is bilinearly interpolated to the solver nodes.
Field solve_forward(const Field& a, const PdeParams& params, const Grid& grid);

/// F(a) = u(a) - u(a0).
Field forward_operator(const Field& a, const PdeParams& params, const Grid& grid);

/// Gradient of a -> ||u(a) - u^delta||^p for the discrete scheme (discrete
/// adjoint), in the inner product of a's grid.
Field misfit_gradient(const Field& a, const Field& udelta, const PdeParams& params,
                      const Grid& grid, double p = 2.0);

/// Forward operator a -> u(a) - u(a0) on a fixed solver grid. Accepts
/// coefficients on any grid; gradients come back on the coefficient's grid
/// through the transpose of the interpolation.
class PdeForwardModel final : public ForwardModel {
 public:
  PdeForwardModel(PdeParams params, Grid solver_grid);

  std::string name() const override { return "crank-nicolson"; }
  Field apply(const Field& a) const override;
  Field adjoint_derivative(const Field& a, const Field& r) const override;
  std::optional<Box> bounds() const override { return params_.bounds; }
  MisfitEvaluation misfit(const Field& a, const Field& ydelta, double p,
                          bool with_gradient) const override;

  const PdeParams& params() const { return params_; }
  const Grid& solver_grid() const { return grid_; }
  /// u(a0) on the solver grid.
  const Field& reference_solution() const { return u_prior_; }
  /// Converts data u^delta into the operator's data space: u^delta - u(a0).
  Field data_from_observation(const Field& udelta) const;

 private:
  PdeParams params_;
  Grid grid_;
  Field u_prior_;
};

}  // namespace morozov::pde
