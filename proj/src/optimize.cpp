#include "morozov/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace morozov {

void WolfeParams::validate() const {
  if (!(0.0 < c1 && c1 < c2 && c2 < 1.0))
    throw std::invalid_argument("Wolfe constants must satisfy 0 < c1 < c2 < 1");
  if (max_bracket_steps == 0) throw std::invalid_argument("max_bracket_steps must be positive");
  if (!(value_noise >= 0.0 && value_noise < 1.0))
    throw std::invalid_argument("value_noise must lie in [0, 1)");
}

void StopRule::validate() const {
  if (discrepancy_band && discrepancy_band->lower > discrepancy_band->upper)
    throw std::invalid_argument("discrepancy band lower bound exceeds upper bound");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
  if (rel_residual_tol < 0.0 || gradient_tol < 0.0)
    throw std::invalid_argument("stopping tolerances must be non-negative");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::band_hit:
      return "band-hit";
    case StopReason::max_iters:
      return "max-iters";
    case StopReason::stalled:
      return "stalled";
    case StopReason::gradient_zero:
      return "gradient-zero";
  }
  return "unknown";
}

namespace {

struct Trial {
  double t;
  double f;
  double g;
};

// Minimizer of the cubic through (a, fa, ga) and (b, fb, gb), safeguarded to
// the inner 80% of the interval; falls back to bisection.
double cubic_step(const Trial& a, const Trial& b, bool values_flat) {
  const double lo = std::min(a.t, b.t);
  const double hi = std::max(a.t, b.t);
  const double width = hi - lo;
  const double mid = 0.5 * (lo + hi);
  if (values_flat) {
    // Values carry no information here: secant on the slopes.
    const double t = a.t - a.g * (b.t - a.t) / (b.g - a.g);
    if (!std::isfinite(t) || t < lo + 0.1 * width || t > hi - 0.1 * width) return mid;
    return t;
  }
  const double d1 = a.g + b.g - 3.0 * (a.f - b.f) / (a.t - b.t);
  const double disc = d1 * d1 - a.g * b.g;
  if (!(disc >= 0.0)) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b.t - a.t);
  const double denom = b.g - a.g + 2.0 * d2;
  if (denom == 0.0) return mid;
  const double t = b.t - (b.t - a.t) * (b.g + d2 - d1) / denom;
  if (!std::isfinite(t) || t < lo + 0.1 * width || t > hi - 0.1 * width) return mid;
  return t;
}

}  // namespace

LineSearchResult wolfe_line_search(const std::function<LinePoint(double)>& phi, LinePoint at_zero,
                                   const WolfeParams& params, double initial_step) {
  params.validate();
  if (!(at_zero.slope < 0.0))
    throw std::invalid_argument("line search needs a descent direction (phi'(0) < 0)");
  if (!(initial_step > 0.0) || !std::isfinite(initial_step))
    throw std::invalid_argument("initial step must be positive and finite");

  const double f0 = at_zero.value;
  const double g0 = at_zero.slope;
  LineSearchResult result;
  Trial best{0.0, f0, g0};

  const double noise = params.value_noise * std::abs(f0);
  const auto flat = [&](const Trial& a, const Trial& b) { return std::abs(a.f - b.f) <= noise; };
  // Change from a to b, estimated from the slopes when the values are within noise.
  const auto change = [&](const Trial& a, const Trial& b) {
    return flat(a, b) ? 0.5 * (a.g + b.g) * (b.t - a.t) : b.f - a.f;
  };
  const Trial origin{0.0, f0, g0};
  const auto sufficient = [&](const Trial& tr) {
    return change(origin, tr) <= params.c1 * tr.t * g0;
  };
  const auto curvature = [&](const Trial& tr) { return std::abs(tr.g) <= -params.c2 * g0; };
  const auto evaluate = [&](double t) {
    const LinePoint p = phi(t);
    ++result.evaluations;
    Trial tr{t, p.value, p.slope};
    if (std::isfinite(tr.f) && sufficient(tr) && change(best, tr) < 0.0) best = tr;
    return tr;
  };
  const auto finish = [&](LineSearchStatus status, const Trial& tr) {
    result.status = status;
    result.step = tr.t;
    result.value = tr.f;
    result.slope = tr.g;
    return result;
  };

  auto zoom = [&](Trial lo, Trial hi) {
    while (result.evaluations < params.max_bracket_steps) {
      if (std::abs(hi.t - lo.t) <= 1e-16 * std::max(1.0, std::abs(lo.t))) break;
      const Trial tr = evaluate(cubic_step(lo, hi, flat(lo, hi)));
      if (!std::isfinite(tr.f) || !sufficient(tr) || change(lo, tr) >= 0.0) {
        hi = tr;
      } else {
        if (curvature(tr)) return finish(LineSearchStatus::converged, tr);
        if (tr.g * (hi.t - lo.t) >= 0.0) hi = lo;
        lo = tr;
      }
    }
    return finish(LineSearchStatus::exhausted, best);
  };

  Trial prev{0.0, f0, g0};
  double t = initial_step;
  for (std::size_t i = 1; result.evaluations < params.max_bracket_steps; ++i) {
    const Trial cur = evaluate(t);
    if (!std::isfinite(cur.f) || !sufficient(cur) || (i > 1 && change(prev, cur) >= 0.0))
      return zoom(prev, cur);
    if (curvature(cur)) return finish(LineSearchStatus::converged, cur);
    if (cur.g >= 0.0) return zoom(cur, prev);
    prev = cur;
    t *= 2.0;
  }
  return finish(LineSearchStatus::exhausted, best);
}

LineSearchResult wolfe_line_search(const std::function<double(double)>& f,
                                   const std::function<double(double)>& g,
                                   const WolfeParams& params, double initial_step) {
  return wolfe_line_search([&](double t) { return LinePoint{f(t), g(t)}; }, LinePoint{f(0.0), g(0.0)},
                           params, initial_step);
}

double initial_step(std::optional<double> prev_grad_sqnorm, double cur_grad_sqnorm) {
  if (!(cur_grad_sqnorm > 0.0))
    throw std::domain_error("current gradient vanishes; the iteration has converged");
  if (!prev_grad_sqnorm) return 1.0;
  return *prev_grad_sqnorm / cur_grad_sqnorm;
}

namespace {

// Zeroes direction components that would immediately leave the box.
Field mask_active(const Field& x, const Field& d, const std::optional<Box>& box) {
  if (!box) return d;
  Eigen::VectorXd v = d.values();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double xk = x.values()[k];
    if ((xk <= box->lower && v[k] < 0.0) || (xk >= box->upper && v[k] > 0.0)) v[k] = 0.0;
  }
  return d.with_values(std::move(v));
}

// Direction restricted to the components that stay inside the box at step t.
Field moving_part(const Field& x, const Field& d, double t, const std::optional<Box>& box) {
  if (!box) return d;
  Eigen::VectorXd v = d.values();
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double z = x.values()[k] + t * v[k];
    if (z < box->lower || z > box->upper) v[k] = 0.0;
  }
  return d.with_values(std::move(v));
}

void require_finite(const TikhonovEvaluation& e, const Field& x) {
  if (!std::isfinite(e.value) || (e.gradient && !e.gradient->values().allFinite())) {
    std::ostringstream os;
    os << "non-finite Tikhonov functional (value " << e.value << ") at iterate with " << x.size()
       << " entries";
    throw NonFiniteFunctional(os.str(), x);
  }
}

TikhonovEvaluation evaluate_checked(const Field& x, const ForwardModel& model, const Field& ydelta,
                                    const TikhonovConfig& cfg) {
  // Non-finite intermediate fields are rejected by Field itself; report them
  // the same way as a non-finite value.
  try {
    TikhonovEvaluation e = evaluate_tikhonov(x, model, ydelta, cfg, true);
    require_finite(e, x);
    return e;
  } catch (const std::invalid_argument& err) {
    if (std::string(err.what()).find("non-finite") != std::string::npos)
      throw NonFiniteFunctional(err.what(), x);
    throw;
  }
}

bool in_band(const std::optional<ResidualBand>& band, double residual) {
  return band && band->lower <= residual && residual <= band->upper;
}

}  // namespace

RegularizedSolution minimize_tikhonov(const ForwardModel& model, const Field& ydelta,
                                      const TikhonovConfig& cfg, const DiscretizationLadder& ladder,
                                      std::size_t level, const WolfeParams& wolfe,
                                      const StopRule& stop, const std::optional<Field>& x_start) {
  cfg.validate(true);
  wolfe.validate();
  stop.validate();
  const std::optional<Box> box = model.bounds();

  Field x = clamp_to(ladder.project(level, x_start ? *x_start : cfg.penalty.prior()), box);
  TikhonovEvaluation cur = evaluate_checked(x, model, ydelta, cfg);

  RegularizedSolution sol;
  sol.alpha = cfg.alpha;
  sol.level = level;
  sol.objective_trace.push_back(cur.value);

  std::optional<double> prev_gsq;
  double prev_step = 1.0;
  int exhausted_in_a_row = 0;
  StopReason reason = StopReason::max_iters;

  while (true) {
    if (in_band(stop.discrepancy_band, cur.residual)) {
      reason = StopReason::band_hit;
      break;
    }
    const Field d = mask_active(x, -1.0 * ladder.restrict_direction(level, *cur.gradient), box);
    const double gsq = squared_norm(d);
    if (std::sqrt(gsq) <= stop.gradient_tol) {
      reason = StopReason::gradient_zero;
      break;
    }
    if (sol.iterations >= stop.max_iters) {
      reason = StopReason::max_iters;
      break;
    }

    const double trial = prev_step * initial_step(prev_gsq, gsq);
    std::optional<TikhonovEvaluation> last;
    std::optional<Field> last_x;
    auto phi = [&](double t) {
      Field xt = clamp_to(axpy(x, t, d), box);
      TikhonovEvaluation e = evaluate_checked(xt, model, ydelta, cfg);
      const double slope = dot(*e.gradient, moving_part(x, d, t, box));
      const LinePoint p{e.value, slope};
      last = std::move(e);
      last_x = std::move(xt);
      return p;
    };
    const LineSearchResult ls = wolfe_line_search(phi, LinePoint{cur.value, -gsq}, wolfe, trial);

    if (ls.status == LineSearchStatus::exhausted) {
      ++exhausted_in_a_row;
    } else {
      exhausted_in_a_row = 0;
    }
    // Accepted steps decrease the functional, possibly only by a slope estimate below roundoff.
    if (ls.step > 0.0) {
      // The callback cached the most recent trial; re-evaluate only if the
      // accepted step was an earlier one.
      Field xn = clamp_to(axpy(x, ls.step, d), box);
      TikhonovEvaluation en =
          (last_x && last_x->values() == xn.values()) ? std::move(*last) : evaluate_checked(xn, model, ydelta, cfg);
      const double rel_change =
          cur.residual > 0.0 ? std::abs(en.residual - cur.residual) / cur.residual : 0.0;
      x = std::move(xn);
      cur = std::move(en);
      ++sol.iterations;
      sol.objective_trace.push_back(cur.value);
      prev_gsq = gsq;
      prev_step = ls.step;
      if (stop.rel_residual_tol > 0.0 && rel_change < stop.rel_residual_tol &&
          !in_band(stop.discrepancy_band, cur.residual)) {
        reason = StopReason::stalled;
        break;
      }
    } else if (exhausted_in_a_row == 0) {
      // Converged search that failed to decrease: numerically flat.
      reason = StopReason::stalled;
      break;
    } else {
      prev_step = 1.0;
      prev_gsq.reset();
    }
    if (exhausted_in_a_row >= 2) {
      reason = StopReason::stalled;
      break;
    }
  }

  sol.x = std::move(x);
  sol.residual = cur.residual;
  sol.penalty = cur.penalty;
  sol.value = cur.value;
  sol.stop_reason = reason;
  return sol;
}

RegularizedSolution minimize_tikhonov(const ForwardModel& model, const Field& ydelta,
                                      const TikhonovConfig& cfg, const WolfeParams& wolfe,
                                      const StopRule& stop, const std::optional<Field>& x_start) {
  const Field& layout = x_start ? *x_start : cfg.penalty.prior();
  const DiscretizationLadder ladder =
      layout.is_surface() ? DiscretizationLadder::grids({layout.grid()})
                          : DiscretizationLadder::coordinates(layout.size(), {layout.size()});
  return minimize_tikhonov(model, ydelta, cfg, ladder, 0, wolfe, stop, x_start);
}

}  // namespace morozov
