#pragma once

#include "morozov/field.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace morozov {

/// Pointwise box constraint lower <= x <= upper.
struct Box {
  double lower;
  double upper;
};

/// Raised when an element lies outside the domain of a forward operator.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::size_t index, double value, Box box)
      : std::domain_error(what), index_(index), value_(value), box_(box) {}
  std::size_t index() const { return index_; }
  double value() const { return value_; }
  Box box() const { return box_; }

 private:
  std::size_t index_;
  double value_;
  Box box_;
};

/// Misfit ||F(x) - y||^p with optional gradient.
struct MisfitEvaluation {
  double residual = 0.0;  ///< ||F(x) - y||
  double value = 0.0;     ///< residual^p
  std::optional<Field> gradient;
};

/// Forward operator F : D(F) -> Y.
///
/// Implementations must be deterministic and safe to call concurrently.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual std::string name() const = 0;
  virtual Field apply(const Field& x) const = 0;
  /// F'(x)^* r, with the adjoint taken in the inner products of x's and r's layouts.
  virtual Field adjoint_derivative(const Field& x, const Field& r) const = 0;
  virtual std::optional<Box> bounds() const { return std::nullopt; }

  /// Residual norm, misfit value and (optionally) its gradient
  /// p ||r||^(p-2) F'(x)^* r. Models with expensive state may override this
  /// to share work between value and gradient.
  virtual MisfitEvaluation misfit(const Field& x, const Field& ydelta, double p,
                                  bool with_gradient) const;
};

/// Throws DomainError naming the first entry outside the model's box.
void check_domain(const ForwardModel& model, const Field& x);

/// Clamps into the box (identity without bounds).
Field clamp_to(const Field& x, const std::optional<Box>& box);

/// Gradient of x -> ||F(x) - y||^p.
Field misfit_gradient(const ForwardModel& model, const Field& x, const Field& ydelta, double p);

/// Linear model F(x) = A x on coordinate vectors.
class MatrixModel final : public ForwardModel {
 public:
  explicit MatrixModel(Eigen::MatrixXd a, std::optional<Box> box = std::nullopt,
                       std::string name = "matrix");

  std::string name() const override { return name_; }
  Field apply(const Field& x) const override;
  Field adjoint_derivative(const Field& x, const Field& r) const override;
  std::optional<Box> bounds() const override { return box_; }

  const Eigen::MatrixXd& matrix() const { return a_; }

 private:
  Eigen::MatrixXd a_;
  std::optional<Box> box_;
  std::string name_;
};

}  // namespace morozov
