#pragma once

#include "morozov/pde.hpp"

#include <cstdint>
#include <filesystem>

namespace morozov {

struct SimpsonResult {
  double value = 0.0;
  /// Set when an axis has an even node count and its last panel was closed
  /// with the trapezoid rule.
  bool trapezoid_closure = false;
};

/// Tensor-product composite Simpson rule over the surface's grid.
SimpsonResult simpson_2d(const Field& u);

/// Where the squared difference in the noise estimate is integrated.
enum class NoiseEvaluation {
  data_nodes,  ///< on the noisy data's grid, clean data restricted to it
  fine_grid,   ///< on the clean data's grid, noisy data prolonged to it
};
std::string to_string(NoiseEvaluation where);
NoiseEvaluation noise_evaluation_from_string(const std::string& name);

/// (integral |u_clean - u_delta|^2)^{1/2} by Simpson's rule on the chosen grid.
double estimate_noise_level(const Field& u_clean_fine, const Field& u_delta_coarse,
                            NoiseEvaluation where = NoiseEvaluation::data_nodes);

struct NoisyDataset {
  Field u_delta;       ///< noisy data on the coarse grid
  Field u_clean_fine;  ///< noiseless solution on the fine grid
  double delta = 0.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  Grid fine_grid;
  Grid coarse_grid;
  NoiseEvaluation evaluation = NoiseEvaluation::data_nodes;
};

/// Solves on `fine` with a_true, adds N(0, noise_std^2) at every fine node
/// (mt19937_64 seeded with `seed`), interpolates to `coarse` and estimates delta.
NoisyDataset generate_data(const Field& a_true, const pde::PdeParams& params, const Grid& fine,
                           const Grid& coarse, double noise_std, std::uint64_t seed,
                           NoiseEvaluation where = NoiseEvaluation::data_nodes);

/// Directory with u_delta.txt, u_clean.txt and meta.txt.
void save_dataset(const std::filesystem::path& dir, const NoisyDataset& data);
NoisyDataset load_dataset(const std::filesystem::path& dir);

}  // namespace morozov
