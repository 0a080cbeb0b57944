#pragma once

#include "morozov/config.hpp"
#include "morozov/diagnostics.hpp"
#include "morozov/synthdata.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace morozov {

enum class ExperimentKind { pde_sweep, linear_oracle, rate_study, sequential_demo };
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// One entry of the regularization-parameter grid: a literal or a power of
/// the noise level ("delta", "sqrt(delta)", "delta^2").
struct AlphaSpec {
  std::string text;
  double value(double delta) const;
  static AlphaSpec parse(const std::string& text);
};

struct PdeSweepConfig {
  double b = 0.03;
  double a0 = 0.08;
  double a_min = 0.005;
  double a_max = 1.0;
  double solver_dtau = 0.02;
  double solver_dy = 0.1;
  double fine_dtau = 0.0025;
  double fine_dy = 0.01;
  double noise_std = 0.01;
  NoiseEvaluation noise_evaluation = NoiseEvaluation::data_nodes;
  bool redraw_noise_per_mesh = false;
  std::vector<double> dtau{0.1, 0.08, 0.07, 0.06, 0.05, 0.04, 0.03, 0.02, 0.01, 0.0075, 0.005, 0.0025};
  std::vector<double> dy{0.25, 0.22, 0.20, 0.17, 0.15, 0.13, 0.11, 0.1, 0.05, 0.04, 0.02, 0.01};
  bool crossed = false;
  /// Stop each cell's descent as soon as the residual enters the band.
  bool stop_at_band = true;
  std::vector<AlphaSpec> alphas;  ///< filled with the default grid when empty
  H1Weights weights;
};

struct LinearConfig {
  std::size_t n = 8;
  std::size_t instances = 100;
  double max_condition = 100.0;
  double alpha_min = 1e-4;
  double alpha_max = 1e2;
  std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<std::size_t> dims;  ///< ladder dimensions; empty means {n}
};

struct SequentialConfig {
  double tau_tilde = 1.2;
  double alpha0 = 1.0;
  double q = 0.5;
  std::size_t kmax = 40;
  double delta = 0.1;
  std::size_t n = 4;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::pde_sweep;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string output = "out";
  DiscrepancyBand band;
  WolfeParams wolfe;
  std::size_t max_iters = 500;
  double rel_residual_tol = 1e-4;
  double gradient_tol = 1e-12;
  PdeSweepConfig pde;
  LinearConfig linear;
  SequentialConfig sequential;

  /// Effective configuration in the input format (defaults resolved).
  std::string to_text() const;
  void validate() const;
};

ExperimentConfig parse_experiment_config(const ConfigFile& file);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::vector<AlphaSpec> default_alpha_grid();
/// Coefficient meshes (dtau, dy) of the sweep, zipped or crossed.
std::vector<std::pair<double, double>> sweep_meshes(const PdeSweepConfig& cfg);

struct SweepCell {
  std::size_t mesh = 0;
  std::string alpha_text;
  double alpha = 0.0;
  double residual = 0.0;
  double l2_error = 0.0;
  bool in_band = false;
  std::size_t iterations = 0;
  std::string status;  ///< stop reason, or the error message of a rejected solve
  bool ok = false;
  std::optional<Field> reconstruction;
};

struct MeshRow {
  double dtau = 0.0;
  double dy = 0.0;
  std::size_t n_points = 0;
  std::optional<std::size_t> selected;  ///< index into cells
  double alpha = 0.0;
  double residual = 0.0;
  double l2_error = 0.0;
  bool in_band = false;
};

struct SweepResult {
  double delta = 0.0;
  std::vector<SweepCell> cells;  ///< mesh-major, alpha-minor
  std::vector<MeshRow> meshes;
  std::optional<std::size_t> min_error_mesh;
};

/// Runs every (mesh, alpha) cell and selects per mesh the in-band alpha > 0
/// with the smallest residual (or the closest one, flagged out of band).
SweepResult run_pde_sweep(const ExperimentConfig& cfg);

struct OracleReport {
  std::size_t instances = 0;
  double max_rel_error = 0.0;
  double seconds = 0.0;
  std::vector<double> rel_errors;
  std::vector<double> alphas;
};
OracleReport run_linear_oracle(const ExperimentConfig& cfg);

struct RateStudy {
  RateTable table;
  std::vector<std::string> failures;  ///< one message per skipped delta
};
RateStudy run_rate_study(const ExperimentConfig& cfg);

SequentialResult run_sequential_demo(const ExperimentConfig& cfg);

/// Writes the artifacts of the configured experiment into `out` and returns
/// the process exit status (0 ok, 3 search exhaustion).
int run_experiment_to(const ExperimentConfig& cfg, const std::filesystem::path& out);

/// Minimizer settings of the configuration, optionally with a residual band.
MinimizerSettings minimizer_settings(const ExperimentConfig& cfg,
                                     std::optional<ResidualBand> band = std::nullopt);

}  // namespace morozov
