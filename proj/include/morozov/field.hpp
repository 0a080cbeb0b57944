#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace morozov {

/// Uniform tensor mesh on [t_min, t_max] x [y_min, y_max].
///
/// Nodes are indexed (i, j) with i along time and j along space; fields on the
/// grid are stored row-major, i.e. node (i, j) lives at i * ny + j.
struct Grid {
  double t_min = 0.0;
  double t_max = 1.0;
  double y_min = -5.0;
  double y_max = 5.0;
  std::size_t nt = 2;
  std::size_t ny = 2;
  double dt = 1.0;
  double dy = 10.0;

  /// Grid with the requested node counts; steps follow from the extents.
  static Grid from_counts(std::size_t nt, std::size_t ny, double t_min = 0.0, double t_max = 1.0,
                          double y_min = -5.0, double y_max = 5.0);

  /// Grid whose steps are as close as possible to the nominal ones. When a step
  /// does not divide its extent the node count is rounded and the step snapped
  /// to extent / (count - 1).
  static Grid from_steps(double dt, double dy, double t_min = 0.0, double t_max = 1.0,
                         double y_min = -5.0, double y_max = 5.0);

  double t(std::size_t i) const { return i + 1 == nt ? t_max : t_min + static_cast<double>(i) * dt; }
  double y(std::size_t j) const { return j + 1 == ny ? y_max : y_min + static_cast<double>(j) * dy; }
  std::size_t size() const { return nt * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * ny + j; }
  double area() const { return (t_max - t_min) * (y_max - y_min); }

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  /// True when every node of `coarse` is a node of this grid.
  bool contains_nodes_of(const Grid& coarse) const;

  /// True when `other` lies inside this grid's extents.
  bool covers(const Grid& other) const;

  std::string describe() const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.nt == b.nt && a.ny == b.ny && a.t_min == b.t_min && a.t_max == b.t_max &&
           a.y_min == b.y_min && a.y_max == b.y_max && a.dt == b.dt && a.dy == b.dy;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }
};

/// One-dimensional trapezoid weights for n nodes with step h.
Eigen::VectorXd trapezoid_weights(std::size_t n, double h);

/// Element of a domain or data space.
///
/// A field is either a plain coordinate vector (inner product: l2) or a
/// surface sampled on a Grid (inner product: trapezoidal L2 over the grid).
/// Values are finite and immutable once constructed.
class Field {
 public:
  Field() = default;

  static Field vector(Eigen::VectorXd values);
  static Field surface(const Grid& grid, Eigen::VectorXd values);
  static Field constant(const Grid& grid, double value);
  static Field sample(const Grid& grid, const std::function<double(double, double)>& fn);
  static Field zeros_like(const Field& layout);

  bool is_surface() const { return grid_.has_value(); }
  const Grid& grid() const;
  const std::optional<Grid>& grid_opt() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t k) const { return values_[static_cast<Eigen::Index>(k)]; }
  double at(std::size_t i, std::size_t j) const;

  /// Same kind, same grid (if any) and same length.
  bool same_layout(const Field& other) const;

  /// A field with this layout and new values.
  Field with_values(Eigen::VectorXd values) const;

  /// Quadrature weights of the inner product (all ones for vectors).
  Eigen::VectorXd weights() const;

 private:
  std::optional<Grid> grid_;
  Eigen::VectorXd values_;
};

/// Throws std::invalid_argument naming `what` when layouts differ.
void require_same_layout(const Field& a, const Field& b, const std::string& what);

double dot(const Field& a, const Field& b);
double squared_norm(const Field& a);
double norm(const Field& a);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

/// a + s * b
Field axpy(const Field& a, double s, const Field& b);

/// Converts Euclidean partial derivatives with respect to the stored values
/// into the gradient with respect to the field's own inner product.
Field riesz_gradient(const Field& layout, const Eigen::VectorXd& partials);

}  // namespace morozov
