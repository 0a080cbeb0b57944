#pragma once

#include "morozov/ladder.hpp"

#include <cstdint>
#include <utility>

namespace morozov {

/// y = A x† with A square.
struct LinearModel {
  Eigen::MatrixXd a;
  Eigen::VectorXd xdagger;
  Eigen::VectorXd y;

  MatrixModel model(std::optional<Box> box = std::nullopt) const;
  double condition_number() const;
};

/// Solves (A^T A + alpha I) x = A^T y^delta + alpha x0.
Eigen::VectorXd closed_form_minimizer(const Eigen::MatrixXd& a, const Eigen::VectorXd& ydelta,
                                      double alpha, const Eigen::VectorXd& x0);

struct LadderModelOptions {
  bool identity = false;
  double max_condition = 100.0;
};

/// Random A = U diag(s) V^T with s log-uniform in [1, max_condition] scaled by
/// 1 / max_condition^(1/2), random x†, coordinate ladder with the given
/// dimensions. Deterministic per seed.
std::pair<LinearModel, DiscretizationLadder> make_ladder_model(
    std::size_t n, const std::vector<std::size_t>& dims, std::uint64_t seed,
    const LadderModelOptions& options = {});

/// Symmetric positive definite A = Q diag(s) Q^T and x† = A w, so that
/// x† satisfies the source condition for the quadratic penalty with x0 = 0.
LinearModel make_spd_source_model(std::size_t n, std::uint64_t seed, double max_condition = 100.0);

/// Gaussian noise rescaled to norm exactly `delta`.
Eigen::VectorXd noise_of_norm(std::size_t n, double delta, std::uint64_t seed);

}  // namespace morozov
