#include "morozov/diagnostics.hpp"

#include "morozov/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace morozov {

BregmanReport bregman_distance(const Penalty& penalty, const Field& u, const Field& v,
                               const std::optional<Field>& xi) {
  require_same_layout(u, v, "Bregman distance");
  BregmanReport out;
  out.subgradient_used = xi ? *xi : penalty.gradient(v);
  require_same_layout(out.subgradient_used, v, "Bregman subgradient");
  out.distance = penalty.value(u) - penalty.value(v) - dot(out.subgradient_used, u - v);
  std::ostringstream os;
  os << to_string(penalty.kind()) << " penalty, " << u.size() << " entries, ||u - v|| = "
     << norm(u - v);
  out.at = os.str();
  return out;
}

CoercivityReport q_coercivity_check(const Penalty& penalty, double q, double zeta,
                                    std::size_t samples, std::uint64_t seed, double lower,
                                    double upper) {
  if (q < 1.0) throw std::invalid_argument("q must be at least 1");
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  if (!(lower < upper)) throw std::invalid_argument("sample range is empty");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(lower, upper);
  const Field& layout = penalty.prior();
  const auto draw = [&] {
    Eigen::VectorXd v(static_cast<Eigen::Index>(layout.size()));
    for (auto& x : v) x = unif(rng);
    return layout.with_values(std::move(v));
  };

  CoercivityReport out;
  out.worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    const Field u = draw();
    const Field v = draw();
    const double gap = std::pow(norm(u - v), q);
    if (gap == 0.0) continue;
    out.worst_ratio = std::min(out.worst_ratio, bregman_distance(penalty, u, v).distance / gap);
    ++out.samples;
  }
  out.passed = out.samples > 0 && out.worst_ratio >= zeta * (1.0 - 1e-12);
  return out;
}

double l2_error(const Field& x, const Field& x_true) {
  require_same_layout(x, x_true, "l2_error (interpolate to a common grid first)");
  return norm(x - x_true);
}

double l2_error_on(const Field& x, const Field& x_true, const Grid& grid) {
  return norm(interpolate(x, grid) - interpolate(x_true, grid));
}

double eta_m(const DiscretizationLadder& ladder, std::size_t level, const Penalty& penalty,
             const Field& xdagger) {
  const Field pm = ladder.embed(level, ladder.project(level, xdagger), xdagger);
  return bregman_distance(penalty, pm, xdagger).distance;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw std::domain_error("log-log slope of non-positive data");
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::domain_error("slope needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

RateTable rate_table(const std::vector<RateRun>& runs, const Penalty& penalty, const Field& x_true,
                     const DiscretizationLadder& ladder, double p) {
  std::set<double> deltas;
  for (const auto& r : runs) deltas.insert(r.delta);
  if (deltas.size() < 3) throw std::invalid_argument("rate table needs at least 3 distinct deltas");

  const Field xi_true = penalty.gradient(x_true);
  RateTable table;
  table.p = p;
  for (const auto& run : runs) {
    if (!run.result.solution)
      throw std::invalid_argument("rate table run without a solution (search failed)");
    const RegularizedSolution& sol = *run.result.solution;
    const std::size_t m = run.result.level;
    const Field x = ladder.embed(m, sol.x, x_true);
    RateRow row;
    row.delta = run.delta;
    row.alpha = sol.alpha;
    row.level = m;
    row.residual = sol.residual;
    row.bregman = bregman_distance(penalty, x, x_true, xi_true).distance;
    row.l2_error = l2_error(x, x_true);
    row.gamma_m = run.result.gamma_m;
    row.phi_m = phi_m(ladder, m, x_true);
    row.eta_m = eta_m(ladder, m, penalty, x_true);
    table.rows.push_back(row);
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const RateRow& a, const RateRow& b) { return a.delta > b.delta; });

  std::vector<double> d;
  for (const auto& r : table.rows) d.push_back(r.delta);
  const auto fit = [&](const std::string& key, auto column) {
    std::vector<double> ys;
    for (const auto& r : table.rows) ys.push_back(column(r));
    if (std::all_of(ys.begin(), ys.end(), [](double v) { return v > 0.0; }))
      table.slopes[key] = loglog_slope(d, ys);
  };
  fit("residual", [](const RateRow& r) { return r.residual; });
  fit("bregman", [](const RateRow& r) { return r.bregman; });
  fit("l2_error", [](const RateRow& r) { return r.l2_error; });
  fit("alpha", [](const RateRow& r) { return r.alpha; });
  fit("delta_p_over_alpha", [p](const RateRow& r) { return std::pow(r.delta, p) / r.alpha; });
  return table;
}

void RateTable::write_csv(std::ostream& os) const {
  os << csv_header << '\n' << std::setprecision(17);
  for (const auto& r : rows)
    os << r.delta << ',' << r.alpha << ',' << r.level << ',' << r.residual << ',' << r.bregman << ','
       << r.l2_error << ',' << r.gamma_m << ',' << r.phi_m << ',' << r.eta_m << '\n';
}

void RateTable::write_slopes(std::ostream& os) const {
  os << "quantity,slope\n" << std::setprecision(17);
  for (const auto& [k, v] : slopes) os << k << ',' << v << '\n';
}

}  // namespace morozov
