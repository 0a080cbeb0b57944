#include "morozov/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace morozov {

DiscrepancyBand DiscrepancyBand::make(double tau, double lambda, double tau2) {
  DiscrepancyBand b;
  b.tau = tau;
  b.lambda = lambda;
  b.tau1 = tau;
  b.tau2 = tau2;
  b.epsilon = 0.5 * (tau - 1.0);
  b.validate();
  return b;
}

void DiscrepancyBand::validate() const {
  if (!(1.0 < tau && tau <= tau1 && tau1 <= tau2 && tau2 < lambda))
    throw std::invalid_argument("discrepancy band needs 1 < tau <= tau1 <= tau2 < lambda");
  if (!(0.0 < epsilon && epsilon < tau - 1.0))
    throw std::invalid_argument("discrepancy margin epsilon must lie in (0, tau - 1)");
}

bool check_band(double residual, double delta, const DiscrepancyBand& band) {
  return band.tau * delta <= residual && residual <= band.lambda * delta;
}

bool in_h_set(double residual, double delta, const DiscrepancyBand& band) {
  return residual < (band.tau - band.epsilon) * delta;
}

double residual_L(const ForwardModel& model, const Field& ydelta, const Field& x) {
  return norm(model.apply(x) - ydelta);
}

double penalty_H(const Penalty& penalty, const Field& x) { return penalty.value(x); }

double value_I(const ForwardModel& model, const Field& ydelta, const TikhonovConfig& cfg,
               const Field& x) {
  return evaluate_tikhonov(x, model, ydelta, cfg, false).value;
}

std::string to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::in_band:
      return "in-band";
    case SearchStatus::no_upper_bracket:
      return "no-upper-bracket";
    case SearchStatus::exhausted:
      return "exhausted";
  }
  return "unknown";
}

namespace {

class AlphaProbeRunner {
 public:
  AlphaProbeRunner(const ForwardModel& model, const Field& ydelta, const Penalty& penalty, double p,
                   const DiscretizationLadder& ladder, std::size_t level,
                   const MinimizerSettings& settings, MorozovResult& out)
      : model_(model),
        ydelta_(ydelta),
        penalty_(penalty),
        p_(p),
        ladder_(ladder),
        level_(level),
        settings_(settings),
        out_(out) {}

  const RegularizedSolution& operator()(double alpha) {
    TikhonovConfig cfg{alpha, p_, penalty_};
    solutions_.push_back(
        minimize_tikhonov(model_, ydelta_, cfg, ladder_, level_, settings_.wolfe, settings_.stop));
    ++out_.minimizations;
    out_.probes.push_back({alpha, solutions_.back().residual});
    return solutions_.back();
  }

  const std::vector<RegularizedSolution>& solutions() const { return solutions_; }

 private:
  const ForwardModel& model_;
  const Field& ydelta_;
  const Penalty& penalty_;
  double p_;
  const DiscretizationLadder& ladder_;
  std::size_t level_;
  const MinimizerSettings& settings_;
  MorozovResult& out_;
  std::vector<RegularizedSolution> solutions_;
};

double distance_to(double r, double lo, double hi) {
  if (r < lo) return lo - r;
  if (r > hi) return r - hi;
  return 0.0;
}

}  // namespace

MorozovResult morozov_alpha_search_targets(const ForwardModel& model, const Field& ydelta,
                                           const Penalty& penalty, double p,
                                           const DiscretizationLadder& ladder, std::size_t level,
                                           double lo, double hi, const AlphaSearchOptions& options) {
  if (!(options.alpha_min > 0.0 && options.alpha_min <= options.alpha_max))
    throw std::invalid_argument("alpha bracket must satisfy 0 < alpha_min <= alpha_max");
  if (!(options.log_tol > 0.0)) throw std::invalid_argument("log tolerance must be positive");
  if (!(lo <= hi)) throw std::invalid_argument("residual targets are inverted");

  MorozovResult out;
  out.level = level;
  out.band_lower = lo;
  out.band_upper = hi;

  const Field start = clamp_to(ladder.project(level, penalty.prior()), model.bounds());
  const double prior_residual = residual_L(model, ydelta, start);
  if (!(prior_residual > hi)) {
    out.status = SearchStatus::no_upper_bracket;
    std::ostringstream os;
    os << "residual at the projected prior " << prior_residual << " does not exceed the upper target "
       << hi;
    out.diagnostics = os.str();
    return out;
  }

  AlphaProbeRunner solve(model, ydelta, penalty, p, ladder, level, options.minimizer, out);
  const auto accept = [&](const RegularizedSolution& s) {
    out.status = SearchStatus::in_band;
    out.alpha = s.alpha;
    out.solution = s;
    return out;
  };
  const auto inside = [&](double r) { return lo <= r && r <= hi; };

  double a_hi = options.alpha_max;
  double r_hi = solve(a_hi).residual;
  if (inside(r_hi)) return accept(solve.solutions().back());
  for (std::size_t k = 0; r_hi < lo && k < options.max_expansions; ++k) {
    a_hi *= 10.0;
    r_hi = solve(a_hi).residual;
    if (inside(r_hi)) return accept(solve.solutions().back());
  }

  double a_lo = std::min(options.alpha_min, a_hi);
  double r_lo = a_lo == a_hi ? r_hi : solve(a_lo).residual;
  if (inside(r_lo)) return accept(solve.solutions().back());
  for (std::size_t k = 0; r_lo > hi && k < options.max_expansions; ++k) {
    a_hi = a_lo;
    r_hi = r_lo;
    a_lo /= 10.0;
    r_lo = solve(a_lo).residual;
    if (inside(r_lo)) return accept(solve.solutions().back());
  }

  if (r_hi > hi && r_lo < lo) {
    while (std::log(a_hi / a_lo) >= options.log_tol) {
      const double mid = std::sqrt(a_lo * a_hi);
      const RegularizedSolution& s = solve(mid);
      if (inside(s.residual)) return accept(s);
      if (s.residual < lo) {
        a_lo = mid;
        r_lo = s.residual;
      } else {
        a_hi = mid;
        r_hi = s.residual;
      }
    }
    out.residual_jump = true;
  }

  // No probe landed in the band: report the closest one.
  const auto& sols = solve.solutions();
  std::size_t best = 0;
  for (std::size_t k = 1; k < sols.size(); ++k)
    if (distance_to(sols[k].residual, lo, hi) < distance_to(sols[best].residual, lo, hi)) best = k;
  out.status = SearchStatus::exhausted;
  out.alpha = sols[best].alpha;
  out.solution = sols[best];
  std::ostringstream os;
  if (out.residual_jump) {
    os << "residual jumps across [" << lo << ", " << hi << "] between alpha " << a_lo << " ("
       << r_lo << ") and " << a_hi << " (" << r_hi << ")";
  } else {
    os << "no bracket of [" << lo << ", " << hi << "] within alpha range [" << a_lo << ", " << a_hi
       << "]: residuals " << r_lo << ", " << r_hi;
  }
  out.diagnostics = os.str();
  return out;
}

MorozovResult morozov_alpha_search(const ForwardModel& model, const Field& ydelta,
                                   const Penalty& penalty, double p, const DiscrepancyBand& band,
                                   const DiscretizationLadder& ladder, std::size_t level,
                                   double delta, double gamma, const AlphaSearchOptions& options) {
  band.validate();
  if (!(delta >= 0.0) || !(gamma >= 0.0))
    throw std::invalid_argument("noise level and gamma_m must be non-negative");
  MorozovResult r = morozov_alpha_search_targets(model, ydelta, penalty, p, ladder, level,
                                                 band.tau1 * (delta + gamma),
                                                 band.tau2 * (delta + gamma), options);
  r.gamma_m = gamma;
  return r;
}

LevelSelection select_level(const std::vector<double>& gammas, double delta,
                            const DiscrepancyBand& band, LevelOrder order) {
  band.validate();
  if (gammas.empty()) throw std::invalid_argument("select_level needs at least one level");
  LevelSelection sel;
  sel.bound = (band.lambda / band.tau2 - 1.0) * delta;
  sel.best_level = static_cast<std::size_t>(
      std::min_element(gammas.begin(), gammas.end()) - gammas.begin());
  sel.best_gamma = gammas[sel.best_level];
  const std::size_t n = gammas.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = order == LevelOrder::coarse_to_fine ? k : n - 1 - k;
    if (gammas[m] <= sel.bound) {
      sel.level = m;
      break;
    }
  }
  return sel;
}

GammaSupply GammaSupply::exact(Field xdagger) {
  GammaSupply g;
  g.mode = Mode::exact;
  g.xdagger = std::move(xdagger);
  return g;
}

GammaSupply GammaSupply::from_bounds(std::vector<double> bounds) {
  GammaSupply g;
  g.mode = Mode::bound;
  g.bounds = std::move(bounds);
  return g;
}

GammaSupply GammaSupply::holder(double constant, double exponent,
                                std::vector<double> projection_norms) {
  GammaSupply g;
  g.mode = Mode::holder;
  g.holder_constant = constant;
  g.holder_exponent = exponent;
  g.projection_norms = std::move(projection_norms);
  return g;
}

std::vector<double> GammaSupply::evaluate(const DiscretizationLadder& ladder,
                                          const ForwardModel& model) const {
  std::vector<double> out(ladder.size());
  switch (mode) {
    case Mode::exact:
      if (!xdagger) throw std::invalid_argument("exact gamma supply needs the true solution");
      for (std::size_t m = 0; m < ladder.size(); ++m) out[m] = gamma_m(ladder, m, model, *xdagger);
      return out;
    case Mode::bound:
      if (bounds.size() != ladder.size())
        throw std::invalid_argument("gamma bounds must list one value per level");
      return bounds;
    case Mode::holder:
      if (projection_norms.size() != ladder.size())
        throw std::invalid_argument("Hölder gamma supply needs one projection norm per level");
      for (std::size_t m = 0; m < ladder.size(); ++m)
        out[m] = holder_constant * std::pow(projection_norms[m], holder_exponent);
      return out;
  }
  return out;
}

JointResult joint_discrepancy_search(const ForwardModel& model, const Field& ydelta,
                                     const Penalty& penalty, double p,
                                     const DiscretizationLadder& ladder,
                                     const DiscrepancyBand& band, double delta,
                                     const GammaSupply& gamma, const JointSearchOptions& options) {
  band.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("joint search needs a positive noise level");

  JointResult out;
  out.gammas = gamma.evaluate(ladder, model);
  out.selection = select_level(out.gammas, delta, band, options.order);

  const std::size_t n = ladder.size();
  std::ostringstream diag;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = options.order == LevelOrder::coarse_to_fine ? k : n - 1 - k;
    const double g = out.gammas[m];
    if (g <= out.selection.bound) {
      MorozovResult r = morozov_alpha_search(model, ydelta, penalty, p, band, ladder, m, delta, g,
                                             options.alpha);
      const bool ok = r.status == SearchStatus::in_band && r.solution &&
                      check_band(r.solution->residual, delta, band);
      out.per_level.push_back(r);
      diag << "level " << m << " (gamma " << g << ", per-level band): " << to_string(r.status);
      if (!r.diagnostics.empty()) diag << " - " << r.diagnostics;
      diag << '\n';
      if (ok) {
        out.result = std::move(r);
        out.result.diagnostics = diag.str();
        return out;
      }
    }
    MorozovResult r = morozov_alpha_search_targets(model, ydelta, penalty, p, ladder, m,
                                                   band.tau * delta, band.lambda * delta,
                                                   options.alpha);
    r.gamma_m = g;
    const bool ok = r.status == SearchStatus::in_band && r.solution &&
                    check_band(r.solution->residual, delta, band);
    out.per_level.push_back(r);
    diag << "level " << m << " (gamma " << g << ", direct band): " << to_string(r.status);
    if (!r.diagnostics.empty()) diag << " - " << r.diagnostics;
    diag << '\n';
    if (ok) {
      out.result = std::move(r);
      out.result.diagnostics = diag.str();
      return out;
    }
  }
  out.result = MorozovResult{};
  out.result.status = SearchStatus::exhausted;
  out.result.band_lower = band.tau * delta;
  out.result.band_upper = band.lambda * delta;
  out.result.diagnostics = diag.str();
  return out;
}

SequentialResult sequential_discrepancy(const ForwardModel& model, const Field& ydelta,
                                        const Penalty& penalty, double p,
                                        const DiscretizationLadder& ladder, std::size_t level,
                                        double tau_tilde, double alpha0, double q, std::size_t kmax,
                                        double delta, const MinimizerSettings& settings) {
  if (!(tau_tilde > 1.0)) throw std::invalid_argument("sequential principle needs tau_tilde > 1");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("sequential principle needs alpha0 > 0");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("sequential principle needs 0 < q < 1");
  const double threshold = tau_tilde * delta;

  SequentialResult out;
  double alpha = alpha0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    TikhonovConfig cfg{alpha, p, penalty};
    RegularizedSolution s =
        minimize_tikhonov(model, ydelta, cfg, ladder, level, settings.wolfe, settings.stop);
    out.trace.push_back({alpha, s.residual});
    if (s.residual <= threshold) {
      out.k = k;
      out.alpha = alpha;
      if (k > 0) out.bracket_residual_prev = out.trace[k - 1].residual;
      out.solution = std::move(s);
      return out;
    }
    out.solution = std::move(s);
    out.alpha = alpha;
    out.k = k;
    alpha *= q;
  }
  out.exhausted = true;
  return out;
}

}  // namespace morozov
