#pragma once

#include "morozov/ladder.hpp"
#include "morozov/tikhonov.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace morozov {

/// Strong Wolfe constants; 0 < c1 < c2 < 1.
struct WolfeParams {
  double c1 = 1e-8;
  double c2 = 0.95;
  std::size_t max_bracket_steps = 50;  ///< total trial evaluations per search
  /// Relative size of roundoff in function values. Two values closer than
  /// value_noise * |phi(0)| are compared through the slopes instead
  /// (trapezoid estimate of the change), as in approximate Wolfe searches.
  double value_noise = 1e-10;

  void validate() const;
};

/// Residual band [lower, upper] that ends the descent early when reached.
struct ResidualBand {
  double lower;
  double upper;
};

struct StopRule {
  std::optional<ResidualBand> discrepancy_band;
  std::size_t max_iters = 500;
  /// Stop once |r_k - r_{k-1}| / r_{k-1} falls below this; 0 disables.
  double rel_residual_tol = 1.0e-4;
  /// Stop once the norm of the projected gradient falls to this value.
  double gradient_tol = 1e-12;

  void validate() const;
};

enum class StopReason { band_hit, max_iters, stalled, gradient_zero };
std::string to_string(StopReason reason);

struct RegularizedSolution {
  Field x;
  double residual = 0.0;
  double penalty = 0.0;
  double value = 0.0;
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::max_iters;
  double alpha = 0.0;
  std::size_t level = 0;
  /// Functional value at the start point and after every accepted step;
  /// non-increasing up to WolfeParams::value_noise relative roundoff.
  std::vector<double> objective_trace;
};

/// Value and derivative of a scalar function along a ray.
struct LinePoint {
  double value;
  double slope;
};

enum class LineSearchStatus { converged, exhausted };

struct LineSearchResult {
  LineSearchStatus status = LineSearchStatus::exhausted;
  double step = 0.0;   ///< accepted step, or the best decreasing trial on exhaustion (0 if none)
  double value = 0.0;  ///< function value at `step`
  double slope = 0.0;
  std::size_t evaluations = 0;
};

/// Strong Wolfe line search: bracketing phase followed by zoom with safeguarded
/// cubic interpolation. `phi` returns value and slope at a trial step;
/// `at_zero` is phi(0). Throws std::invalid_argument unless at_zero.slope < 0.
LineSearchResult wolfe_line_search(const std::function<LinePoint(double)>& phi, LinePoint at_zero,
                                   const WolfeParams& params, double initial_step);

/// Same search with separate value and derivative callbacks.
LineSearchResult wolfe_line_search(const std::function<double(double)>& f,
                                   const std::function<double(double)>& g,
                                   const WolfeParams& params, double initial_step);

/// Ratio of the previous to the current squared gradient norm; 1 on the first
/// iteration (no previous gradient). Throws std::domain_error when the current
/// gradient vanishes.
double initial_step(std::optional<double> prev_grad_sqnorm, double cur_grad_sqnorm);

/// Raised when the functional becomes non-finite; carries the iterate.
class NonFiniteFunctional : public std::runtime_error {
 public:
  NonFiniteFunctional(const std::string& what, Field iterate)
      : std::runtime_error(what), iterate_(std::move(iterate)) {}
  const Field& iterate() const { return iterate_; }

 private:
  Field iterate_;
};

/// Projected steepest descent on the Tikhonov functional over D_m with strong
/// Wolfe steps. The trial step is the previous accepted step scaled by
/// initial_step(). Starts from P_m x_start (default: P_m x0).
RegularizedSolution minimize_tikhonov(const ForwardModel& model, const Field& ydelta,
                                      const TikhonovConfig& cfg, const DiscretizationLadder& ladder,
                                      std::size_t level, const WolfeParams& wolfe,
                                      const StopRule& stop,
                                      const std::optional<Field>& x_start = std::nullopt);

/// Ladder-free overload: the whole domain of the start point (or prior).
RegularizedSolution minimize_tikhonov(const ForwardModel& model, const Field& ydelta,
                                      const TikhonovConfig& cfg, const WolfeParams& wolfe,
                                      const StopRule& stop,
                                      const std::optional<Field>& x_start = std::nullopt);

/// Minimizer settings bundled for the parameter-choice routines.
struct MinimizerSettings {
  WolfeParams wolfe;
  StopRule stop;
};

}  // namespace morozov
