#include "morozov/experiment.hpp"

#include "morozov/interpolation.hpp"
#include "morozov/linear_testbed.hpp"
#include "morozov/surface_io.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace morozov {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::pde_sweep:
      return "pde-sweep";
    case ExperimentKind::linear_oracle:
      return "linear-oracle";
    case ExperimentKind::rate_study:
      return "rate-study";
    case ExperimentKind::sequential_demo:
      return "sequential-demo";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::pde_sweep, ExperimentKind::linear_oracle, ExperimentKind::rate_study,
                 ExperimentKind::sequential_demo})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown experiment kind '" + name +
                    "' (pde-sweep, linear-oracle, rate-study, sequential-demo)");
}

AlphaSpec AlphaSpec::parse(const std::string& text) {
  AlphaSpec s{trim(text)};
  if (s.text == "delta" || s.text == "sqrt(delta)" || s.text == "delta^2") return s;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s.text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.text.size() || !(v >= 0.0))
    throw ConfigError("alpha entry '" + s.text +
                      "' is neither a non-negative number nor delta, sqrt(delta), delta^2");
  return s;
}

double AlphaSpec::value(double delta) const {
  if (text == "delta") return delta;
  if (text == "sqrt(delta)") return std::sqrt(delta);
  if (text == "delta^2") return delta * delta;
  return std::stod(text);
}

std::vector<AlphaSpec> default_alpha_grid() {
  std::vector<AlphaSpec> out;
  for (const char* s : {"0.25", "0.10", "sqrt(delta)", "0.01", "0.006", "delta", "0.001", "5e-4",
                        "1e-4", "5e-5", "delta^2", "0"})
    out.push_back(AlphaSpec::parse(s));
  return out;
}

std::vector<std::pair<double, double>> sweep_meshes(const PdeSweepConfig& cfg) {
  std::vector<std::pair<double, double>> out;
  if (cfg.crossed) {
    for (double t : cfg.dtau)
      for (double y : cfg.dy) out.emplace_back(t, y);
  } else {
    for (std::size_t k = 0; k < cfg.dtau.size(); ++k) out.emplace_back(cfg.dtau[k], cfg.dy[k]);
  }
  return out;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "experiment.kind", "experiment.seed", "experiment.workers", "experiment.output",
      "band.tau", "band.lambda", "band.tau1", "band.tau2", "band.epsilon",
      "optimizer.c1", "optimizer.c2", "optimizer.value_noise", "optimizer.max_bracket_steps", "optimizer.max_iters",
      "optimizer.rel_residual_tol", "optimizer.gradient_tol",
      "pde.b", "pde.a0", "pde.a_min", "pde.a_max", "pde.solver_dtau", "pde.solver_dy",
      "data.fine_dtau", "data.fine_dy", "data.noise_std", "data.noise_evaluation",
      "data.redraw_noise_per_mesh",
      "sweep.dtau", "sweep.dy", "sweep.pairing", "sweep.alphas", "sweep.stop_at_band",
      "penalty.beta1", "penalty.beta2", "penalty.beta3", "penalty.scale_by_steps",
      "linear.n", "linear.instances", "linear.max_condition", "linear.alpha_min",
      "linear.alpha_max", "linear.deltas", "linear.dims",
      "sequential.tau_tilde", "sequential.alpha0", "sequential.q", "sequential.kmax",
      "sequential.delta", "sequential.n"};
  return keys;
}

std::size_t to_count(long long v, const std::string& key) {
  if (v < 0) throw ConfigError("key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << v[k];
  return os.str();
}

}  // namespace

ExperimentConfig parse_experiment_config(const ConfigFile& f) {
  f.require_known(known_keys());
  ExperimentConfig c;
  c.kind = experiment_kind_from_string(f.get_string("experiment.kind", to_string(c.kind)));
  c.seed = static_cast<std::uint64_t>(to_count(f.get_int("experiment.seed", 1), "experiment.seed"));
  c.workers = to_count(f.get_int("experiment.workers", 1), "experiment.workers");
  c.output = f.get_string("experiment.output", c.output);

  c.band.tau = f.get_double("band.tau", c.band.tau);
  c.band.lambda = f.get_double("band.lambda", c.band.lambda);
  c.band.tau1 = f.get_double("band.tau1", c.band.tau);
  c.band.tau2 = f.get_double("band.tau2", c.band.tau2);
  c.band.epsilon = f.get_double("band.epsilon", (c.band.tau - 1.0) / 2.0);

  c.wolfe.c1 = f.get_double("optimizer.c1", c.wolfe.c1);
  c.wolfe.c2 = f.get_double("optimizer.c2", c.wolfe.c2);
  c.wolfe.value_noise = f.get_double("optimizer.value_noise", c.wolfe.value_noise);
  c.wolfe.max_bracket_steps =
      to_count(f.get_int("optimizer.max_bracket_steps", static_cast<long long>(c.wolfe.max_bracket_steps)),
               "optimizer.max_bracket_steps");
  c.max_iters = to_count(f.get_int("optimizer.max_iters", static_cast<long long>(c.max_iters)),
                         "optimizer.max_iters");
  c.rel_residual_tol = f.get_double("optimizer.rel_residual_tol", c.rel_residual_tol);
  c.gradient_tol = f.get_double("optimizer.gradient_tol", c.gradient_tol);

  auto& p = c.pde;
  p.b = f.get_double("pde.b", p.b);
  p.a0 = f.get_double("pde.a0", p.a0);
  p.a_min = f.get_double("pde.a_min", p.a_min);
  p.a_max = f.get_double("pde.a_max", p.a_max);
  p.solver_dtau = f.get_double("pde.solver_dtau", p.solver_dtau);
  p.solver_dy = f.get_double("pde.solver_dy", p.solver_dy);
  p.fine_dtau = f.get_double("data.fine_dtau", p.fine_dtau);
  p.fine_dy = f.get_double("data.fine_dy", p.fine_dy);
  p.noise_std = f.get_double("data.noise_std", p.noise_std);
  try {
    p.noise_evaluation = noise_evaluation_from_string(
        f.get_string("data.noise_evaluation", to_string(p.noise_evaluation)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("key 'data.noise_evaluation': ") + e.what());
  }
  p.redraw_noise_per_mesh = f.get_bool("data.redraw_noise_per_mesh", p.redraw_noise_per_mesh);
  p.dtau = f.get_doubles("sweep.dtau", p.dtau);
  p.dy = f.get_doubles("sweep.dy", p.dy);
  const std::string pairing = f.get_string("sweep.pairing", "zipped");
  if (pairing != "zipped" && pairing != "crossed")
    throw ConfigError("key 'sweep.pairing' must be zipped or crossed, got '" + pairing + "'");
  p.crossed = pairing == "crossed";
  p.stop_at_band = f.get_bool("sweep.stop_at_band", p.stop_at_band);
  if (f.has("sweep.alphas")) {
    for (const auto& s : f.get_strings("sweep.alphas", {})) p.alphas.push_back(AlphaSpec::parse(s));
  } else {
    p.alphas = default_alpha_grid();
  }
  p.weights.beta1 = f.get_double("penalty.beta1", p.weights.beta1);
  p.weights.beta2 = f.get_double("penalty.beta2", p.weights.beta2);
  p.weights.beta3 = f.get_double("penalty.beta3", p.weights.beta3);
  p.weights.scale_by_steps = f.get_bool("penalty.scale_by_steps", p.weights.scale_by_steps);

  auto& l = c.linear;
  l.n = to_count(f.get_int("linear.n", static_cast<long long>(l.n)), "linear.n");
  l.instances = to_count(f.get_int("linear.instances", static_cast<long long>(l.instances)),
                         "linear.instances");
  l.max_condition = f.get_double("linear.max_condition", l.max_condition);
  l.alpha_min = f.get_double("linear.alpha_min", l.alpha_min);
  l.alpha_max = f.get_double("linear.alpha_max", l.alpha_max);
  l.deltas = f.get_doubles("linear.deltas", l.deltas);
  for (double d : f.get_doubles("linear.dims", {})) {
    if (d < 1.0 || d != std::floor(d)) throw ConfigError("key 'linear.dims' needs positive integers");
    l.dims.push_back(static_cast<std::size_t>(d));
  }

  auto& s = c.sequential;
  s.tau_tilde = f.get_double("sequential.tau_tilde", s.tau_tilde);
  s.alpha0 = f.get_double("sequential.alpha0", s.alpha0);
  s.q = f.get_double("sequential.q", s.q);
  s.kmax = to_count(f.get_int("sequential.kmax", static_cast<long long>(s.kmax)), "sequential.kmax");
  s.delta = f.get_double("sequential.delta", s.delta);
  s.n = to_count(f.get_int("sequential.n", static_cast<long long>(s.n)), "sequential.n");

  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(ConfigFile::load(path));
}

void ExperimentConfig::validate() const {
  const auto wrap = [](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  };
  wrap([&] { band.validate(); });
  wrap([&] { wolfe.validate(); });
  if (workers == 0) throw ConfigError("key 'experiment.workers' must be positive");
  if (max_iters == 0) throw ConfigError("key 'optimizer.max_iters' must be positive");
  if (pde.dtau.empty() || pde.dy.empty()) throw ConfigError("sweep mesh lists must be non-empty");
  if (!pde.crossed && pde.dtau.size() != pde.dy.size())
    throw ConfigError("zipped sweep needs equally long 'sweep.dtau' and 'sweep.dy' lists");
  if (pde.alphas.empty()) throw ConfigError("key 'sweep.alphas' must be non-empty");
  if (!(pde.noise_std >= 0.0)) throw ConfigError("key 'data.noise_std' must be non-negative");
  wrap([&] { pde::PdeParams{pde.b, pde.a0, {pde.a_min, pde.a_max}}.validate(); });
  if (kind == ExperimentKind::rate_study && linear.deltas.size() < 3)
    throw ConfigError("rate study needs at least 3 values in 'linear.deltas'");
  if (linear.n == 0) throw ConfigError("key 'linear.n' must be positive");
  for (std::size_t d : linear.dims)
    if (d > linear.n) throw ConfigError("key 'linear.dims' exceeds 'linear.n'");
  if (!(0.0 < linear.alpha_min && linear.alpha_min <= linear.alpha_max))
    throw ConfigError("linear alpha range must satisfy 0 < alpha_min <= alpha_max");
  if (!(sequential.tau_tilde > 1.0 && sequential.alpha0 > 0.0 && sequential.q > 0.0 &&
        sequential.q < 1.0))
    throw ConfigError("sequential principle needs tau_tilde > 1, alpha0 > 0, 0 < q < 1");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17) << std::boolalpha;
  os << "[experiment]\nkind = " << to_string(kind) << "\nseed = " << seed
     << "\nworkers = " << workers << "\noutput = " << output << "\n\n";
  os << "[band]\ntau = " << band.tau << "\nlambda = " << band.lambda << "\ntau1 = " << band.tau1
     << "\ntau2 = " << band.tau2 << "\nepsilon = " << band.epsilon << "\n\n";
  os << "[optimizer]\nc1 = " << wolfe.c1 << "\nc2 = " << wolfe.c2 << "\nvalue_noise = " << wolfe.value_noise
     << "\nmax_bracket_steps = " << wolfe.max_bracket_steps << "\nmax_iters = " << max_iters
     << "\nrel_residual_tol = " << rel_residual_tol << "\ngradient_tol = " << gradient_tol
     << "\n\n";
  os << "[pde]\nb = " << pde.b << "\na0 = " << pde.a0 << "\na_min = " << pde.a_min
     << "\na_max = " << pde.a_max << "\nsolver_dtau = " << pde.solver_dtau
     << "\nsolver_dy = " << pde.solver_dy << "\n\n";
  os << "[data]\nfine_dtau = " << pde.fine_dtau << "\nfine_dy = " << pde.fine_dy
     << "\nnoise_std = " << pde.noise_std << "\nnoise_evaluation = " << to_string(pde.noise_evaluation)
     << "\nredraw_noise_per_mesh = " << pde.redraw_noise_per_mesh << "\n\n";
  os << "[sweep]\ndtau = " << join(pde.dtau) << "\ndy = " << join(pde.dy)
     << "\npairing = " << (pde.crossed ? "crossed" : "zipped")
     << "\nstop_at_band = " << pde.stop_at_band << "\nalphas = ";
  for (std::size_t k = 0; k < pde.alphas.size(); ++k) os << (k ? ", " : "") << pde.alphas[k].text;
  os << "\n\n[penalty]\nbeta1 = " << pde.weights.beta1 << "\nbeta2 = " << pde.weights.beta2
     << "\nbeta3 = " << pde.weights.beta3 << "\nscale_by_steps = " << pde.weights.scale_by_steps
     << "\n\n";
  os << "[linear]\nn = " << linear.n << "\ninstances = " << linear.instances
     << "\nmax_condition = " << linear.max_condition << "\nalpha_min = " << linear.alpha_min
     << "\nalpha_max = " << linear.alpha_max << "\ndeltas = " << join(linear.deltas) << "\ndims = ";
  const std::vector<std::size_t> dims = linear.dims.empty() ? std::vector<std::size_t>{linear.n} : linear.dims;
  for (std::size_t k = 0; k < dims.size(); ++k) os << (k ? ", " : "") << dims[k];
  os << "\n\n[sequential]\ntau_tilde = " << sequential.tau_tilde << "\nalpha0 = " << sequential.alpha0
     << "\nq = " << sequential.q << "\nkmax = " << sequential.kmax << "\ndelta = " << sequential.delta
     << "\nn = " << sequential.n << "\n";
  return os.str();
}

MinimizerSettings minimizer_settings(const ExperimentConfig& cfg, std::optional<ResidualBand> band) {
  MinimizerSettings s;
  s.wolfe = cfg.wolfe;
  s.stop.discrepancy_band = band;
  s.stop.max_iters = cfg.max_iters;
  s.stop.rel_residual_tol = cfg.rel_residual_tol;
  s.stop.gradient_tol = cfg.gradient_tol;
  return s;
}

namespace {

// Runs fn(0..count-1) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) fn(k);
    });
  for (auto& t : pool) t.join();
}

// Settings for minimizers that must reach the exact Tikhonov minimizer.
MinimizerSettings exact_settings(const ExperimentConfig& cfg) {
  MinimizerSettings s;
  s.wolfe = cfg.wolfe;
  s.stop.max_iters = 1000000;
  s.stop.rel_residual_tol = 0.0;
  s.stop.gradient_tol = 1e-13;
  return s;
}

}  // namespace

SweepResult run_pde_sweep(const ExperimentConfig& cfg) {
  const auto& pc = cfg.pde;
  const pde::PdeParams params{pc.b, pc.a0, {pc.a_min, pc.a_max}};
  const Grid fine = Grid::from_steps(pc.fine_dtau, pc.fine_dy);
  const Grid solver = Grid::from_steps(pc.solver_dtau, pc.solver_dy);
  const Field a_true_fine = pde::true_coefficient(fine);
  const pde::PdeForwardModel model(params, solver);
  const auto meshes = sweep_meshes(pc);

  // Datasets: one per seed, or one per mesh when noise is redrawn.
  std::vector<NoisyDataset> data;
  const std::size_t n_data = pc.redraw_noise_per_mesh ? meshes.size() : 1;
  for (std::size_t k = 0; k < n_data; ++k)
    data.push_back(generate_data(a_true_fine, params, fine, solver, pc.noise_std, cfg.seed + k,
                                 pc.noise_evaluation));
  std::vector<Field> ydata;
  for (const auto& d : data) ydata.push_back(model.data_from_observation(d.u_delta));

  SweepResult out;
  out.delta = data.front().delta;
  const std::size_t n_alpha = pc.alphas.size();
  out.cells.resize(meshes.size() * n_alpha);

  parallel_for(out.cells.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t mi = idx / n_alpha;
    const std::size_t ai = idx % n_alpha;
    const std::size_t di = pc.redraw_noise_per_mesh ? mi : 0;
    const double delta = data[di].delta;
    SweepCell& cell = out.cells[idx];
    cell.mesh = mi;
    cell.alpha_text = pc.alphas[ai].text;
    cell.alpha = pc.alphas[ai].value(delta);
    try {
      const Grid g = Grid::from_steps(meshes[mi].first, meshes[mi].second);
      const Penalty penalty = Penalty::weighted_h1(Field::constant(g, pc.a0), pc.weights);
      const DiscretizationLadder ladder = DiscretizationLadder::grids({g}, params.bounds);
      const TikhonovConfig tc{cell.alpha, 2.0, penalty};
      const MinimizerSettings ms =
          pc.stop_at_band
              ? minimizer_settings(cfg, ResidualBand{cfg.band.tau * delta, cfg.band.lambda * delta})
              : minimizer_settings(cfg);
      const RegularizedSolution sol =
          minimize_tikhonov(model, ydata[di], tc, ladder, 0, ms.wolfe, ms.stop);
      cell.residual = sol.residual;
      cell.iterations = sol.iterations;
      cell.status = to_string(sol.stop_reason);
      cell.in_band = check_band(sol.residual, delta, cfg.band);
      cell.l2_error = l2_error_on(sol.x, a_true_fine, fine);
      cell.reconstruction = sol.x;
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.status = std::string("rejected: ") + e.what();
    }
  });

  for (std::size_t mi = 0; mi < meshes.size(); ++mi) {
    MeshRow row;
    row.dtau = meshes[mi].first;
    row.dy = meshes[mi].second;
    row.n_points = Grid::from_steps(row.dtau, row.dy).size();
    const double delta = data[pc.redraw_noise_per_mesh ? mi : 0].delta;
    const double lo = cfg.band.tau * delta;
    const double hi = cfg.band.lambda * delta;
    std::optional<std::size_t> best_in;
    std::optional<std::size_t> closest;
    double closest_gap = std::numeric_limits<double>::infinity();
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
      const std::size_t idx = mi * n_alpha + ai;
      const SweepCell& c = out.cells[idx];
      if (!c.ok || !(c.alpha > 0.0)) continue;
      if (c.in_band) {
        if (!best_in || c.residual < out.cells[*best_in].residual) best_in = idx;
      }
      const double gap = c.residual < lo ? lo - c.residual : (c.residual > hi ? c.residual - hi : 0.0);
      if (gap < closest_gap) {
        closest_gap = gap;
        closest = idx;
      }
    }
    row.selected = best_in ? best_in : closest;
    if (row.selected) {
      const SweepCell& c = out.cells[*row.selected];
      row.alpha = c.alpha;
      row.residual = c.residual;
      row.l2_error = c.l2_error;
      row.in_band = c.in_band;
    }
    out.meshes.push_back(row);
  }
  for (std::size_t mi = 0; mi < out.meshes.size(); ++mi) {
    if (!out.meshes[mi].selected) continue;
    if (!out.min_error_mesh || out.meshes[mi].l2_error < out.meshes[*out.min_error_mesh].l2_error)
      out.min_error_mesh = mi;
  }
  return out;
}

OracleReport run_linear_oracle(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& lc = cfg.linear;
  OracleReport rep;
  rep.instances = lc.instances;
  rep.rel_errors.resize(lc.instances);
  rep.alphas.resize(lc.instances);
  const MinimizerSettings ms = exact_settings(cfg);
  parallel_for(lc.instances, cfg.workers, [&](std::size_t k) {
    const std::uint64_t seed = cfg.seed * 1000003ULL + k;
    std::mt19937_64 rng(seed);
    const std::size_t n = 1 + rng() % lc.n;
    const double la = std::log(lc.alpha_min);
    const double lb = std::log(lc.alpha_max);
    const double alpha = std::exp(std::uniform_real_distribution<double>(la, lb)(rng));
    const auto [lm, ladder] = make_ladder_model(n, {n}, seed, {false, lc.max_condition});
    const Eigen::VectorXd yd = lm.y + noise_of_norm(n, 0.1, seed + 7);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    const MatrixModel model = lm.model();
    const TikhonovConfig tc{alpha, 2.0, Penalty::quadratic(Field::vector(x0))};
    const RegularizedSolution sol =
        minimize_tikhonov(model, Field::vector(yd), tc, ladder, 0, ms.wolfe, ms.stop);
    const Eigen::VectorXd ref = closed_form_minimizer(lm.a, yd, alpha, x0);
    rep.rel_errors[k] = (sol.x.values() - ref).norm() / ref.norm();
    rep.alphas[k] = alpha;
  });
  for (double e : rep.rel_errors) rep.max_rel_error = std::max(rep.max_rel_error, e);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

RateStudy run_rate_study(const ExperimentConfig& cfg) {
  const auto& lc = cfg.linear;
  const LinearModel lm = make_spd_source_model(lc.n, cfg.seed, lc.max_condition);
  const MatrixModel model = lm.model();
  const std::vector<std::size_t> dims = lc.dims.empty() ? std::vector<std::size_t>{lc.n} : lc.dims;
  const DiscretizationLadder ladder = DiscretizationLadder::coordinates(lc.n, dims);
  const Field xdag = Field::vector(lm.xdagger);
  const Penalty penalty =
      Penalty::quadratic(Field::vector(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lc.n))));
  JointSearchOptions opts;
  opts.alpha.minimizer = exact_settings(cfg);
  opts.alpha.alpha_min = 1e-8;
  opts.alpha.alpha_max = 1.0;

  RateStudy study;
  std::vector<std::optional<RateRun>> runs(lc.deltas.size());
  std::vector<std::string> fails(lc.deltas.size());
  parallel_for(lc.deltas.size(), cfg.workers, [&](std::size_t k) {
    const double delta = lc.deltas[k];
    const Field yd = Field::vector(lm.y + noise_of_norm(lc.n, delta, cfg.seed + 17 + k));
    const JointResult jr = joint_discrepancy_search(model, yd, penalty, 2.0, ladder, cfg.band, delta,
                                                    GammaSupply::exact(xdag), opts);
    if (jr.result.status == SearchStatus::in_band && jr.result.solution) {
      runs[k] = RateRun{delta, jr.result};
    } else {
      std::ostringstream os;
      os << "delta " << delta << ": " << to_string(jr.result.status) << " " << jr.result.diagnostics;
      fails[k] = os.str();
    }
  });
  std::vector<RateRun> ok;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (runs[k]) ok.push_back(*runs[k]);
    if (!fails[k].empty()) study.failures.push_back(fails[k]);
  }
  if (ok.size() >= 3) {
    study.table = rate_table(ok, penalty, xdag, ladder, 2.0);
  } else {
    // Too few rows for slopes: keep whatever rows exist without fits.
    for (const auto& r : ok) {
      RateRow row;
      row.delta = r.delta;
      row.alpha = r.result.alpha;
      row.level = r.result.level;
      row.residual = r.result.solution->residual;
      study.table.rows.push_back(row);
    }
  }
  return study;
}

SequentialResult run_sequential_demo(const ExperimentConfig& cfg) {
  const auto& sc = cfg.sequential;
  const auto [lm, ladder] = make_ladder_model(sc.n, {sc.n}, cfg.seed, {true, 1.0});
  const MatrixModel model = lm.model();
  Eigen::VectorXd yd = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sc.n));
  yd[0] = 1.0;
  const Penalty penalty =
      Penalty::quadratic(Field::vector(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sc.n))));
  return sequential_discrepancy(model, Field::vector(yd), penalty, 2.0, ladder, 0, sc.tau_tilde,
                                sc.alpha0, sc.q, sc.kmax, sc.delta, exact_settings(cfg));
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << std::setprecision(17) << std::boolalpha;
  return os;
}

int write_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const SweepResult r = run_pde_sweep(cfg);
  auto res = open_out(out / "residual.csv");
  auto err = open_out(out / "error.csv");
  res << "dtau,dy,n_points,alpha,residual,in_band\n";
  err << "dtau,dy,n_points,alpha,l2_error,in_band\n";
  for (const auto& m : r.meshes) {
    res << m.dtau << ',' << m.dy << ',' << m.n_points << ',' << m.alpha << ',' << m.residual << ','
        << m.in_band << '\n';
    err << m.dtau << ',' << m.dy << ',' << m.n_points << ',' << m.alpha << ',' << m.l2_error << ','
        << m.in_band << '\n';
  }
  auto cells = open_out(out / "cells.csv");
  cells << "dtau,dy,n_points,alpha_spec,alpha,residual,l2_error,in_band,iterations,status\n";
  for (const auto& c : r.cells) {
    const auto& m = r.meshes[c.mesh];
    cells << m.dtau << ',' << m.dy << ',' << m.n_points << ',' << c.alpha_text << ',' << c.alpha
          << ',' << c.residual << ',' << c.l2_error << ',' << c.in_band << ',' << c.iterations
          << ",\"" << c.status << "\"\n";
  }
  std::size_t written = 0;
  for (std::size_t mi = 0; mi < r.meshes.size() && written < 2; ++mi) {
    const auto& m = r.meshes[mi];
    if (!m.in_band || !m.selected) continue;
    std::ostringstream name;
    name << "reconstruction_mesh" << mi << ".txt";
    save_surface(out / name.str(), *r.cells[*m.selected].reconstruction);
    ++written;
  }
  std::size_t in_band = 0;
  for (const auto& m : r.meshes) in_band += m.in_band;
  auto sum = open_out(out / "summary.txt");
  sum << "# effective configuration\n" << cfg.to_text() << "\n# results\n";
  sum << "delta = " << r.delta << "\nband = [" << cfg.band.tau * r.delta << ", "
      << cfg.band.lambda * r.delta << "]\nmeshes = " << r.meshes.size()
      << "\nin_band_meshes = " << in_band << '\n';
  if (r.min_error_mesh) {
    const auto& m = r.meshes[*r.min_error_mesh];
    sum << "min_error_mesh = " << *r.min_error_mesh << " (dtau " << m.dtau << ", dy " << m.dy
        << ", l2_error " << m.l2_error << ", in_band " << m.in_band << ")\n";
  }
  return 0;
}

int write_oracle(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const OracleReport r = run_linear_oracle(cfg);
  auto csv = open_out(out / "oracle.csv");
  csv << "instance,alpha,rel_error\n";
  for (std::size_t k = 0; k < r.instances; ++k)
    csv << k << ',' << r.alphas[k] << ',' << r.rel_errors[k] << '\n';
  auto sum = open_out(out / "summary.txt");
  sum << "# effective configuration\n" << cfg.to_text() << "\n# results\ninstances = " << r.instances
      << "\nmax_rel_error = " << r.max_rel_error << '\n';
  std::cout << "linear oracle: " << r.instances << " instances, max relative error "
            << r.max_rel_error << '\n';
  return 0;
}

int write_rates(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const RateStudy s = run_rate_study(cfg);
  auto csv = open_out(out / "rates.csv");
  s.table.write_csv(csv);
  auto slopes = open_out(out / "slopes.csv");
  s.table.write_slopes(slopes);
  auto sum = open_out(out / "summary.txt");
  sum << "# effective configuration\n" << cfg.to_text() << "\n# results\nrows = " << s.table.rows.size()
      << '\n';
  for (const auto& f : s.failures) sum << "skipped: " << f << '\n';
  if (s.table.rows.empty()) {
    std::cerr << "rate study: every search failed\n";
    for (const auto& f : s.failures) std::cerr << "  " << f << '\n';
    return 3;
  }
  return 0;
}

int write_sequential(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const SequentialResult s = run_sequential_demo(cfg);
  auto csv = open_out(out / "sequential.csv");
  csv << "k,alpha,residual\n";
  for (std::size_t k = 0; k < s.trace.size(); ++k)
    csv << k << ',' << s.trace[k].alpha << ',' << s.trace[k].residual << '\n';
  auto sum = open_out(out / "summary.txt");
  sum << "# effective configuration\n" << cfg.to_text() << "\n# results\nexhausted = "
      << (s.exhausted ? "true" : "false") << "\nk = " << s.k << "\nalpha = " << s.alpha << '\n';
  if (s.bracket_residual_prev) sum << "bracket_residual_prev = " << *s.bracket_residual_prev << '\n';
  return s.exhausted ? 3 : 0;
}

}  // namespace

int run_experiment_to(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  switch (cfg.kind) {
    case ExperimentKind::pde_sweep:
      return write_sweep(cfg, out);
    case ExperimentKind::linear_oracle:
      return write_oracle(cfg, out);
    case ExperimentKind::rate_study:
      return write_rates(cfg, out);
    case ExperimentKind::sequential_demo:
      return write_sequential(cfg, out);
  }
  return 0;
}

}  // namespace morozov
