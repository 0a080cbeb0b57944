#pragma once

#include "morozov/optimize.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace morozov {

/// Multipliers of the relaxed discrepancy principle.
///
///   tau delta <= ||F(x) - y^delta|| <= lambda delta          (joint band)
///   tau1 (delta + gamma_m) <= ||...|| <= tau2 (delta + gamma_m)  (per level)
///
/// with 1 < tau <= tau1 <= tau2 < lambda and 0 < epsilon < tau - 1.
struct DiscrepancyBand {
  double tau = 1.025;
  double lambda = 1.125;
  double tau1 = 1.025;
  double tau2 = 1.075;
  double epsilon = 0.0125;

  /// Band with tau1 = tau and epsilon = (tau - 1) / 2.
  static DiscrepancyBand make(double tau, double lambda, double tau2);
  void validate() const;
};

/// tau delta <= residual <= lambda delta (inclusive).
bool check_band(double residual, double delta, const DiscrepancyBand& band);

/// Membership test of the sets H_m used in the rate analysis:
/// residual < (tau - epsilon) delta.
bool in_h_set(double residual, double delta, const DiscrepancyBand& band);

double residual_L(const ForwardModel& model, const Field& ydelta, const Field& x);
double penalty_H(const Penalty& penalty, const Field& x);
/// L^p + alpha H; alpha = 0 is accepted and gives L^p.
double value_I(const ForwardModel& model, const Field& ydelta, const TikhonovConfig& cfg,
               const Field& x);

enum class SearchStatus { in_band, no_upper_bracket, exhausted };
std::string to_string(SearchStatus status);

/// Order in which levels are tried by the joint search.
enum class LevelOrder { coarse_to_fine, fine_to_coarse };

struct AlphaSearchOptions {
  double alpha_min = 1e-6;   ///< initial lower bracket
  double alpha_max = 1.0;    ///< initial upper bracket
  std::size_t max_expansions = 12;  ///< factor-10 bracket expansions per side
  double log_tol = 1e-3;     ///< bisection stops when log(alpha_hi / alpha_lo) < log_tol
  MinimizerSettings minimizer;
};

/// (alpha, residual) pair visited by a search.
struct AlphaProbe {
  double alpha;
  double residual;
};

struct MorozovResult {
  std::size_t level = 0;
  double alpha = 0.0;
  std::optional<RegularizedSolution> solution;
  double gamma_m = 0.0;
  double band_lower = 0.0;  ///< residual target interval actually used
  double band_upper = 0.0;
  SearchStatus status = SearchStatus::exhausted;
  std::size_t minimizations = 0;
  std::vector<AlphaProbe> probes;
  /// Bisection ended with a residual jump across the band.
  bool residual_jump = false;
  std::string diagnostics;
};

/// Bisection on log alpha for tau1(delta + gamma_m) <= L <= tau2(delta + gamma_m)
/// at a fixed level. Requires ||F(P_m x0) - y^delta|| > tau2(delta + gamma_m),
/// otherwise returns status no_upper_bracket. Every minimization starts from
/// P_m x0.
MorozovResult morozov_alpha_search(const ForwardModel& model, const Field& ydelta,
                                   const Penalty& penalty, double p,
                                   const DiscrepancyBand& band, const DiscretizationLadder& ladder,
                                   std::size_t level, double delta, double gamma,
                                   const AlphaSearchOptions& options);

/// Same search with explicit residual targets (used when no gamma_m is known).
MorozovResult morozov_alpha_search_targets(const ForwardModel& model, const Field& ydelta,
                                           const Penalty& penalty, double p,
                                           const DiscretizationLadder& ladder, std::size_t level,
                                           double target_lower, double target_upper,
                                           const AlphaSearchOptions& options);

struct LevelSelection {
  std::optional<std::size_t> level;
  double bound = 0.0;  ///< (lambda / tau2 - 1) delta
  std::size_t best_level = 0;
  double best_gamma = 0.0;
};

/// First level (in the given order) with gamma_m <= (lambda / tau2 - 1) delta.
LevelSelection select_level(const std::vector<double>& gammas, double delta,
                            const DiscrepancyBand& band,
                            LevelOrder order = LevelOrder::coarse_to_fine);

/// How gamma_m is supplied to the joint search.
struct GammaSupply {
  enum class Mode { exact, bound, holder };
  Mode mode = Mode::exact;
  std::optional<Field> xdagger;   ///< exact: synthetic truth
  std::vector<double> bounds;     ///< bound: one value per level
  double holder_constant = 0.0;   ///< holder: C K in C K ||I - P_m||^l
  double holder_exponent = 1.0;   ///< holder: l
  std::vector<double> projection_norms;  ///< holder: ||I - P_m|| per level

  static GammaSupply exact(Field xdagger);
  static GammaSupply from_bounds(std::vector<double> bounds);
  static GammaSupply holder(double constant, double exponent, std::vector<double> projection_norms);

  std::vector<double> evaluate(const DiscretizationLadder& ladder, const ForwardModel& model) const;
};

struct JointSearchOptions {
  LevelOrder order = LevelOrder::coarse_to_fine;
  AlphaSearchOptions alpha;
};

struct JointResult {
  MorozovResult result;  ///< the selected level's search (status in_band on success)
  std::vector<MorozovResult> per_level;  ///< every level that was attempted, in order
  std::vector<double> gammas;
  LevelSelection selection;
};

/// Joint choice of (m, alpha) with tau delta <= L <= lambda delta.
///
/// Levels are visited in the configured order. A level whose gamma_m meets the
/// level-selection bound is searched with the per-level band using tau1 = tau;
/// any other level (or one whose per-level search fails) is searched directly
/// against [tau delta, lambda delta]. The first in-band level wins.
JointResult joint_discrepancy_search(const ForwardModel& model, const Field& ydelta,
                                     const Penalty& penalty, double p,
                                     const DiscretizationLadder& ladder,
                                     const DiscrepancyBand& band, double delta,
                                     const GammaSupply& gamma, const JointSearchOptions& options);

struct SequentialResult {
  bool exhausted = false;
  std::size_t k = 0;
  double alpha = 0.0;
  std::optional<RegularizedSolution> solution;
  std::optional<double> bracket_residual_prev;
  std::vector<AlphaProbe> trace;
};

/// Smallest k <= kmax with L(alpha_k) <= tau_tilde delta < L(alpha_{k-1}),
/// alpha_k = q^k alpha0.
SequentialResult sequential_discrepancy(const ForwardModel& model, const Field& ydelta,
                                        const Penalty& penalty, double p,
                                        const DiscretizationLadder& ladder, std::size_t level,
                                        double tau_tilde, double alpha0, double q, std::size_t kmax,
                                        double delta, const MinimizerSettings& settings);

}  // namespace morozov
