#include "morozov/ladder.hpp"

#include "morozov/interpolation.hpp"

#include <stdexcept>

namespace morozov {

DiscretizationLadder DiscretizationLadder::coordinates(std::size_t ambient_dim,
                                                       std::vector<std::size_t> dims,
                                                       std::optional<Box> box) {
  if (dims.empty()) throw std::invalid_argument("ladder needs at least one level");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] == 0 || dims[k] > ambient_dim)
      throw std::invalid_argument("coordinate level dimension out of range");
    if (k > 0 && dims[k] <= dims[k - 1])
      throw std::invalid_argument("coordinate ladder dimensions must increase strictly");
  }
  DiscretizationLadder l;
  l.kind_ = Kind::coordinates;
  l.ambient_dim_ = ambient_dim;
  l.dims_ = std::move(dims);
  l.nested_ = true;
  l.box_ = box;
  return l;
}

DiscretizationLadder DiscretizationLadder::grids(std::vector<Grid> levels, std::optional<Box> box,
                                                 bool require_nested) {
  if (levels.empty()) throw std::invalid_argument("ladder needs at least one level");
  for (const Grid& g : levels) g.validate();
  bool nested = true;
  for (std::size_t k = 1; k < levels.size(); ++k)
    nested = nested && levels[k].contains_nodes_of(levels[k - 1]);
  if (require_nested && !nested)
    throw std::invalid_argument("grid ladder is not nested: coarse nodes missing from finer level");
  DiscretizationLadder l;
  l.kind_ = Kind::grids;
  l.grids_ = std::move(levels);
  l.ambient_dim_ = l.grids_.back().size();
  l.nested_ = nested;
  l.box_ = box;
  return l;
}

DiscretizationLadder DiscretizationLadder::nested_grids(const Grid& finest, std::size_t levels,
                                                        std::optional<Box> box) {
  if (levels == 0) throw std::invalid_argument("ladder needs at least one level");
  std::vector<Grid> out{finest};
  for (std::size_t k = 1; k < levels; ++k) {
    const Grid& g = out.back();
    if ((g.nt - 1) % 2 != 0 || (g.ny - 1) % 2 != 0 || g.nt < 3 || g.ny < 3)
      throw std::invalid_argument("cannot coarsen " + g.describe() + " by a factor of two");
    out.push_back(Grid::from_counts((g.nt - 1) / 2 + 1, (g.ny - 1) / 2 + 1, g.t_min, g.t_max, g.y_min,
                                    g.y_max));
  }
  std::vector<Grid> ordered(out.rbegin(), out.rend());
  return grids(std::move(ordered), box, true);
}

std::string DiscretizationLadder::projection_rule() const {
  return kind_ == Kind::coordinates ? "coordinate-truncation" : "bilinear-restriction";
}

void DiscretizationLadder::check_level(std::size_t level) const {
  if (level >= size())
    throw std::out_of_range("ladder level " + std::to_string(level) + " out of range (levels: " +
                            std::to_string(size()) + ")");
}

std::size_t DiscretizationLadder::dimension(std::size_t level) const {
  check_level(level);
  return kind_ == Kind::coordinates ? dims_[level] : grids_[level].size();
}

const Grid& DiscretizationLadder::grid(std::size_t level) const {
  check_level(level);
  if (kind_ != Kind::grids) throw std::logic_error("coordinate ladder has no grids");
  return grids_[level];
}

bool DiscretizationLadder::in_level_layout(std::size_t level, const Field& x) const {
  check_level(level);
  if (kind_ == Kind::coordinates) return !x.is_surface() && x.size() == ambient_dim_;
  return x.is_surface() && x.grid() == grids_[level];
}

Field DiscretizationLadder::project(std::size_t level, const Field& x) const {
  check_level(level);
  if (kind_ == Kind::coordinates) {
    if (x.is_surface() || x.size() != ambient_dim_)
      throw std::invalid_argument("coordinate ladder expects vectors of length " +
                                  std::to_string(ambient_dim_));
    Eigen::VectorXd v = x.values();
    v.tail(static_cast<Eigen::Index>(ambient_dim_ - dims_[level])).setZero();
    return clamp_to(Field::vector(std::move(v)), box_);
  }
  if (!x.is_surface()) throw std::invalid_argument("grid ladder expects surfaces");
  return clamp_to(interpolate(x, grids_[level]), box_);
}

Field DiscretizationLadder::restrict_direction(std::size_t level, const Field& d) const {
  check_level(level);
  if (kind_ == Kind::coordinates) {
    if (d.is_surface() || d.size() != ambient_dim_)
      throw std::invalid_argument("direction has the wrong layout for this ladder");
    Eigen::VectorXd v = d.values();
    v.tail(static_cast<Eigen::Index>(ambient_dim_ - dims_[level])).setZero();
    return Field::vector(std::move(v));
  }
  if (!d.is_surface() || d.grid() != grids_[level])
    throw std::invalid_argument("direction is not on the level grid");
  return d;
}

Field DiscretizationLadder::embed(std::size_t level, const Field& x, const Field& ambient) const {
  check_level(level);
  if (kind_ == Kind::coordinates) {
    require_same_layout(x, ambient, "embed");
    return x;
  }
  return interpolate(x, ambient.grid());
}

Field project(const DiscretizationLadder& ladder, std::size_t level, const Field& x) {
  return ladder.project(level, x);
}

double gamma_m(const DiscretizationLadder& ladder, std::size_t level, const ForwardModel& model,
               const Field& xdagger) {
  const Field projected = ladder.project(level, xdagger);
  return norm(model.apply(xdagger) - model.apply(projected));
}

double phi_m(const DiscretizationLadder& ladder, std::size_t level, const Field& xdagger) {
  const Field projected = ladder.project(level, xdagger);
  return norm(xdagger - ladder.embed(level, projected, xdagger));
}

}  // namespace morozov
