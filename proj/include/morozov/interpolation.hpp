#pragma once

#include "morozov/field.hpp"

#include <array>
#include <vector>

namespace morozov {

/// Bilinear transfer from a source grid to the nodes of a target grid.
///
/// Each target node reads at most four source nodes. Target nodes that
/// coincide with source nodes (up to roundoff) copy the value exactly, so
/// restriction onto a nested grid is exact and interpolation onto the source
/// grid itself is the identity.
class BilinearTransfer {
 public:
  BilinearTransfer(const Grid& source, const Grid& target);

  const Grid& source() const { return source_; }
  const Grid& target() const { return target_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& source_values) const;
  /// Transpose of apply(); maps target-node weights back to source nodes.
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& target_values) const;

  Field apply(const Field& u) const;

 private:
  struct AxisStencil {
    std::size_t lo;
    std::size_t hi;
    double w_hi;  // weight of `hi`; `lo` gets 1 - w_hi
  };

  static std::vector<AxisStencil> axis(double origin, double h, std::size_t n, const Grid& target,
                                       bool time_axis);

  Grid source_;
  Grid target_;
  std::vector<AxisStencil> t_axis_;
  std::vector<AxisStencil> y_axis_;
};

/// Bilinear interpolation of `u` onto `target`; throws when `target` reaches
/// outside the extents of u's grid.
Field interpolate(const Field& u, const Grid& target);

}  // namespace morozov
