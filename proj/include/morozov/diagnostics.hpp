#pragma once

#include "morozov/discrepancy.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>

namespace morozov {

struct BregmanReport {
  double distance = 0.0;
  Field subgradient_used;
  std::string at;
};

/// D_xi(u, v) = f(u) - f(v) - <xi, u - v>; xi defaults to the gradient at v.
BregmanReport bregman_distance(const Penalty& penalty, const Field& u, const Field& v,
                               const std::optional<Field>& xi = std::nullopt);

struct CoercivityReport {
  bool passed = false;
  double worst_ratio = 0.0;  ///< min over samples of D / ||u - v||^q
  std::size_t samples = 0;
};

/// Samples pairs with entries uniform in [lower, upper] (in the prior's layout)
/// and checks D_xi(u, v) >= zeta ||u - v||^q with a 1e-12 relative slack.
CoercivityReport q_coercivity_check(const Penalty& penalty, double q, double zeta,
                                    std::size_t samples, std::uint64_t seed, double lower = 0.5,
                                    double upper = 2.0);

/// ||x - x_true|| in the common layout.
double l2_error(const Field& x, const Field& x_true);
/// Both fields interpolated to `grid` first.
double l2_error_on(const Field& x, const Field& x_true, const Grid& grid);

struct RateRow {
  double delta = 0.0;
  double alpha = 0.0;
  std::size_t level = 0;
  double residual = 0.0;
  double bregman = 0.0;
  double l2_error = 0.0;
  double gamma_m = 0.0;
  double phi_m = 0.0;
  double eta_m = 0.0;
};

struct RateRun {
  double delta;
  MorozovResult result;
};

struct RateTable {
  std::vector<RateRow> rows;  ///< sorted by delta, descending
  /// Least-squares log-log slopes against delta; keys: residual, bregman,
  /// l2_error, alpha, delta_p_over_alpha. Columns with non-positive entries
  /// are left out.
  std::map<std::string, double> slopes;
  double p = 2.0;

  static constexpr const char* csv_header =
      "delta,alpha,level,residual,bregman,l2_error,gamma_m,phi_m,eta_m";
  void write_csv(std::ostream& os) const;
  void write_slopes(std::ostream& os) const;
};

/// eta_m = D_{xi†}(P_m x†, x†)
double eta_m(const DiscretizationLadder& ladder, std::size_t level, const Penalty& penalty,
             const Field& xdagger);

/// Assembles one row per run (runs without a solution are rejected) and fits
/// the slopes. Needs at least three distinct deltas.
RateTable rate_table(const std::vector<RateRun>& runs, const Penalty& penalty, const Field& x_true,
                     const DiscretizationLadder& ladder, double p = 2.0);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace morozov
