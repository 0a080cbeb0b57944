#include "morozov/synthdata.hpp"

#include "morozov/interpolation.hpp"
#include "morozov/surface_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace morozov {

namespace {

// Composite Simpson weights; an even node count closes the last panel with
// the trapezoid rule.
Eigen::VectorXd simpson_weights(std::size_t n, double h, bool& closure) {
  if (n < 3) throw std::invalid_argument("Simpson's rule needs at least 3 nodes per axis");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const std::size_t m = n % 2 == 1 ? n : n - 1;
  for (std::size_t k = 0; k + 2 < m; k += 2) {
    w[static_cast<Eigen::Index>(k)] += h / 3.0;
    w[static_cast<Eigen::Index>(k + 1)] += 4.0 * h / 3.0;
    w[static_cast<Eigen::Index>(k + 2)] += h / 3.0;
  }
  if (m != n) {
    closure = true;
    w[static_cast<Eigen::Index>(n - 2)] += h / 2.0;
    w[static_cast<Eigen::Index>(n - 1)] += h / 2.0;
  }
  return w;
}

}  // namespace

SimpsonResult simpson_2d(const Field& u) {
  const Grid& g = u.grid();
  SimpsonResult out;
  const Eigen::VectorXd wt = simpson_weights(g.nt, g.dt, out.trapezoid_closure);
  const Eigen::VectorXd wy = simpson_weights(g.ny, g.dy, out.trapezoid_closure);
  const auto& v = u.values();
  double total = 0.0;
  for (std::size_t i = 0; i < g.nt; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j)
      row += wy[static_cast<Eigen::Index>(j)] * v[static_cast<Eigen::Index>(g.index(i, j))];
    total += wt[static_cast<Eigen::Index>(i)] * row;
  }
  out.value = total;
  return out;
}

std::string to_string(NoiseEvaluation where) {
  return where == NoiseEvaluation::data_nodes ? "data-nodes" : "fine-grid";
}

NoiseEvaluation noise_evaluation_from_string(const std::string& name) {
  if (name == "data-nodes") return NoiseEvaluation::data_nodes;
  if (name == "fine-grid") return NoiseEvaluation::fine_grid;
  throw std::invalid_argument("unknown noise evaluation '" + name + "' (data-nodes, fine-grid)");
}

double estimate_noise_level(const Field& u_clean_fine, const Field& u_delta_coarse,
                            NoiseEvaluation where) {
  Field diff;
  if (where == NoiseEvaluation::data_nodes)
    diff = interpolate(u_clean_fine, u_delta_coarse.grid()) - u_delta_coarse;
  else
    diff = u_clean_fine - interpolate(u_delta_coarse, u_clean_fine.grid());
  const double integral = simpson_2d(diff.with_values(diff.values().cwiseAbs2())).value;
  // Simpson weights are positive, so the integral is non-negative up to roundoff.
  return std::sqrt(std::max(0.0, integral));
}

NoisyDataset generate_data(const Field& a_true, const pde::PdeParams& params, const Grid& fine,
                           const Grid& coarse, double noise_std, std::uint64_t seed,
                           NoiseEvaluation where) {
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw std::invalid_argument("noise_std must be non-negative");
  fine.validate();
  coarse.validate();
  if (!fine.covers(coarse)) throw std::invalid_argument("coarse grid must lie inside the fine grid");

  NoisyDataset out;
  out.u_clean_fine = pde::solve_forward(a_true, params, fine);
  Eigen::VectorXd noisy = out.u_clean_fine.values();
  if (noise_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index k = 0; k < noisy.size(); ++k) noisy[k] += noise(rng);
  }
  out.u_delta = interpolate(Field::surface(fine, std::move(noisy)), coarse);
  out.delta = estimate_noise_level(out.u_clean_fine, out.u_delta, where);
  out.noise_std = noise_std;
  out.seed = seed;
  out.fine_grid = fine;
  out.coarse_grid = coarse;
  out.evaluation = where;
  return out;
}

namespace {

void write_grid(std::ostream& os, const std::string& prefix, const Grid& g) {
  os << prefix << "_nt=" << g.nt << '\n'
     << prefix << "_ny=" << g.ny << '\n'
     << prefix << "_dt=" << g.dt << '\n'
     << prefix << "_dy=" << g.dy << '\n';
}

}  // namespace

void save_dataset(const std::filesystem::path& dir, const NoisyDataset& data) {
  std::filesystem::create_directories(dir);
  save_surface(dir / "u_delta.txt", data.u_delta);
  save_surface(dir / "u_clean.txt", data.u_clean_fine);
  std::ofstream meta(dir / "meta.txt");
  if (!meta) throw std::runtime_error("cannot write " + (dir / "meta.txt").string());
  meta << std::setprecision(17);
  meta << "seed=" << data.seed << '\n'
       << "noise_std=" << data.noise_std << '\n'
       << "delta=" << data.delta << '\n'
       << "evaluation=" << to_string(data.evaluation) << '\n';
  write_grid(meta, "fine", data.fine_grid);
  write_grid(meta, "coarse", data.coarse_grid);
}

NoisyDataset load_dataset(const std::filesystem::path& dir) {
  NoisyDataset out;
  out.u_delta = load_surface(dir / "u_delta.txt");
  out.u_clean_fine = load_surface(dir / "u_clean.txt");
  out.coarse_grid = out.u_delta.grid();
  out.fine_grid = out.u_clean_fine.grid();

  std::ifstream meta(dir / "meta.txt");
  if (!meta) throw std::runtime_error("cannot read " + (dir / "meta.txt").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto need = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("meta.txt lacks '" + key + "'");
    return it->second;
  };
  out.seed = std::stoull(need("seed"));
  out.noise_std = std::stod(need("noise_std"));
  out.delta = std::stod(need("delta"));
  out.evaluation = noise_evaluation_from_string(need("evaluation"));
  return out;
}

}  // namespace morozov
