#pragma once

#include "morozov/field.hpp"
#include "morozov/forward_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace morozov {

/// Ordered family of finite-dimensional subspaces X_1, X_2, ... of a domain.
///
/// Coordinate ladders live in R^n: level m keeps the first dims[m] coordinates
/// and zeroes the rest. Grid ladders hold one coefficient grid per level,
/// ordered coarse to fine; an element of level m is a surface on that grid and
/// P_m restricts by bilinear interpolation at the level's nodes. A grid ladder
/// is nested when every level's nodes are nodes of the next finer level.
///
/// P_m is subspace projection followed by clamping to the optional box, which
/// is the metric projection onto D(F) ∩ X_m for box domains.
class DiscretizationLadder {
 public:
  enum class Kind { coordinates, grids };

  static DiscretizationLadder coordinates(std::size_t ambient_dim, std::vector<std::size_t> dims,
                                          std::optional<Box> box = std::nullopt);

  /// Grid ladder from an arbitrary list (free-list mode unless the grids
  /// happen to nest). With `require_nested`, non-nested input is rejected.
  static DiscretizationLadder grids(std::vector<Grid> levels, std::optional<Box> box = std::nullopt,
                                    bool require_nested = false);

  /// Nested ladder obtained from `finest` by repeated factor-2 coarsening;
  /// level 0 is the coarsest.
  static DiscretizationLadder nested_grids(const Grid& finest, std::size_t levels,
                                           std::optional<Box> box = std::nullopt);

  Kind kind() const { return kind_; }
  std::size_t size() const { return kind_ == Kind::coordinates ? dims_.size() : grids_.size(); }
  bool nested() const { return nested_; }
  const std::optional<Box>& box() const { return box_; }
  std::string projection_rule() const;

  std::size_t ambient_dim() const { return ambient_dim_; }
  std::size_t dimension(std::size_t level) const;
  const Grid& grid(std::size_t level) const;

  /// P_m x. Coordinate ladders return an ambient-length vector; grid ladders
  /// return a surface on the level's grid.
  Field project(std::size_t level, const Field& x) const;

  /// Component of a search direction lying in X_m (no clamping).
  Field restrict_direction(std::size_t level, const Field& d) const;

  /// Level element expressed in the layout of `ambient` (prolongation for
  /// grid ladders, identity for coordinate ladders).
  Field embed(std::size_t level, const Field& x, const Field& ambient) const;

  /// True when x already lies in the level's subspace layout.
  bool in_level_layout(std::size_t level, const Field& x) const;

 private:
  void check_level(std::size_t level) const;

  Kind kind_ = Kind::coordinates;
  std::size_t ambient_dim_ = 0;
  std::vector<std::size_t> dims_;
  std::vector<Grid> grids_;
  bool nested_ = true;
  std::optional<Box> box_;
};

Field project(const DiscretizationLadder& ladder, std::size_t level, const Field& x);

/// gamma_m = ||F(x†) - F(P_m x†)||
double gamma_m(const DiscretizationLadder& ladder, std::size_t level, const ForwardModel& model,
               const Field& xdagger);

/// phi_m = ||x† - P_m x†||, measured in the layout of x†.
double phi_m(const DiscretizationLadder& ladder, std::size_t level, const Field& xdagger);

}  // namespace morozov
