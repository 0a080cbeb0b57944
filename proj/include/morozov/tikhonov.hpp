#pragma once

#include "morozov/forward_model.hpp"
#include "morozov/penalty.hpp"

#include <optional>

namespace morozov {

struct TikhonovConfig {
  double alpha = 1.0;
  double p = 2.0;
  Penalty penalty;

  /// alpha > 0 (or >= 0 when `allow_zero_alpha`), p >= 1.
  void validate(bool allow_zero_alpha = false) const;
};

struct TikhonovEvaluation {
  double value = 0.0;     ///< residual^p + alpha * penalty
  double residual = 0.0;  ///< ||F(x) - y^delta||
  double penalty = 0.0;   ///< f_{x0}(x)
  std::optional<Field> gradient;
};

/// ||F(x) - y^delta||^p + alpha f_{x0}(x). Rejects x outside the model's box
/// (DomainError) and data of the wrong shape (std::invalid_argument).
double tikhonov_value(const Field& x, const ForwardModel& model, const Field& ydelta,
                      const TikhonovConfig& cfg);

/// Value, residual, penalty and optionally the gradient of the functional.
/// A zero alpha is accepted here (misfit only).
TikhonovEvaluation evaluate_tikhonov(const Field& x, const ForwardModel& model, const Field& ydelta,
                                     const TikhonovConfig& cfg, bool with_gradient);

}  // namespace morozov
