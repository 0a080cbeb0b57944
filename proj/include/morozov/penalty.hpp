#pragma once

#include "morozov/field.hpp"

#include <string>

namespace morozov {

enum class PenaltyKind { quadratic, weighted_h1, kullback_leibler };

std::string to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const std::string& name);

/// Weights of the H1-type smoothing penalty
///   beta1 ||d||^2 + beta2 ||d_y d||^2 + beta3 ||d_t d||^2,  d = x - x0.
/// With `scale_by_steps`, beta2 and beta3 are multiplied by the dy and dt of
/// the grid the penalty is evaluated on.
struct H1Weights {
  double beta1 = 0.5;
  double beta2 = 0.25;
  double beta3 = 0.25;
  bool scale_by_steps = true;
};

/// Penalty f_{x0} with f_{x0}(x0) = 0; convex except for kullback_leibler.
///
/// quadratic:         ||x - x0||^2
/// weighted_h1:       see H1Weights; derivatives are forward differences, with
///                    the last row/column reusing the previous difference
/// kullback_leibler:  sum_w [log(x/x0) - (x0 - x)]  (x, x0 > 0)
///   This integrand is concave and negative for x < x0; the textbook
///   x log(x/x0) - x + x0 is not provided.
///
/// Norms are l2 for vectors and trapezoidal L2 for surfaces. A surface prior
/// is bilinearly resampled when evaluated on a different grid.
class Penalty {
 public:
  static Penalty quadratic(Field prior);
  static Penalty weighted_h1(Field prior, H1Weights weights);
  static Penalty kullback_leibler(Field prior);

  PenaltyKind kind() const { return kind_; }
  const Field& prior() const { return prior_; }
  const H1Weights& h1_weights() const { return weights_; }

  /// Prior expressed in the layout of `x`.
  Field prior_for(const Field& x) const;

  double value(const Field& x) const;
  /// Gradient in the inner product of x's layout (the unique subgradient for
  /// all three kinds).
  Field gradient(const Field& x) const;

 private:
  Penalty(PenaltyKind kind, Field prior, H1Weights weights);

  void check_positive(const Field& x, const char* what) const;

  PenaltyKind kind_;
  Field prior_;
  H1Weights weights_;
};

double penalty_value(const Penalty& penalty, const Field& x);
Field penalty_subgradient(const Penalty& penalty, const Field& x);

}  // namespace morozov
