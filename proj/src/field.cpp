#include "morozov/field.hpp"

#include <cmath>
#include <sstream>

namespace morozov {

namespace {

constexpr double kRelTol = 1e-12;

bool close(double a, double b, double scale) { return std::abs(a - b) <= kRelTol * scale; }

std::size_t count_for(double extent, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  const double intervals = std::round(extent / step);
  if (intervals < 1.0) throw std::invalid_argument("grid step larger than the extent");
  return static_cast<std::size_t>(intervals) + 1;
}

// Position of x on an axis in units of h, snapped to an integer when within roundoff.
std::optional<std::size_t> node_of(double x, double origin, double h, std::size_t n) {
  const double s = (x - origin) / h;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-9 || r < 0.0 || r > static_cast<double>(n - 1)) return std::nullopt;
  return static_cast<std::size_t>(r);
}

}  // namespace

Grid Grid::from_counts(std::size_t nt, std::size_t ny, double t_min, double t_max, double y_min,
                       double y_max) {
  Grid g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.y_min = y_min;
  g.y_max = y_max;
  g.nt = nt;
  g.ny = ny;
  if (nt < 2 || ny < 2) throw std::invalid_argument("grid needs at least two nodes per axis");
  g.dt = (t_max - t_min) / static_cast<double>(nt - 1);
  g.dy = (y_max - y_min) / static_cast<double>(ny - 1);
  g.validate();
  return g;
}

Grid Grid::from_steps(double dt, double dy, double t_min, double t_max, double y_min, double y_max) {
  return from_counts(count_for(t_max - t_min, dt), count_for(y_max - y_min, dy), t_min, t_max, y_min,
                     y_max);
}

void Grid::validate() const {
  if (nt < 2 || ny < 2) throw std::invalid_argument("grid needs at least two nodes per axis");
  if (!(dt > 0.0) || !(dy > 0.0)) throw std::invalid_argument("grid steps must be positive");
  if (!(t_max > t_min) || !(y_max > y_min)) throw std::invalid_argument("grid extents are empty");
  const double et = t_max - t_min;
  const double ey = y_max - y_min;
  if (!close(static_cast<double>(nt - 1) * dt, et, et) ||
      !close(static_cast<double>(ny - 1) * dy, ey, ey)) {
    throw std::invalid_argument("grid steps inconsistent with extents: " + describe());
  }
}

bool Grid::contains_nodes_of(const Grid& coarse) const {
  if (!covers(coarse)) return false;
  for (std::size_t i = 0; i < coarse.nt; ++i)
    if (!node_of(coarse.t(i), t_min, dt, nt)) return false;
  for (std::size_t j = 0; j < coarse.ny; ++j)
    if (!node_of(coarse.y(j), y_min, dy, ny)) return false;
  return true;
}

bool Grid::covers(const Grid& other) const {
  const double st = 1e-12 * std::max(1.0, t_max - t_min);
  const double sy = 1e-12 * std::max(1.0, y_max - y_min);
  return other.t_min >= t_min - st && other.t_max <= t_max + st && other.y_min >= y_min - sy &&
         other.y_max <= y_max + sy;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << "grid(nt=" << nt << ", ny=" << ny << ", dt=" << dt << ", dy=" << dy << ", t=[" << t_min
     << "," << t_max << "], y=[" << y_min << "," << y_max << "])";
  return os.str();
}

Eigen::VectorXd trapezoid_weights(std::size_t n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), h);
  w[0] = 0.5 * h;
  w[static_cast<Eigen::Index>(n) - 1] = 0.5 * h;
  return w;
}

Field Field::vector(Eigen::VectorXd values) {
  if (!values.allFinite()) throw std::invalid_argument("field has non-finite entries");
  Field f;
  f.values_ = std::move(values);
  return f;
}

Field Field::surface(const Grid& grid, Eigen::VectorXd values) {
  grid.validate();
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw std::invalid_argument("surface size " + std::to_string(values.size()) +
                                " does not match " + grid.describe());
  if (!values.allFinite()) throw std::invalid_argument("surface has non-finite entries");
  Field f;
  f.grid_ = grid;
  f.values_ = std::move(values);
  return f;
}

Field Field::constant(const Grid& grid, double value) {
  return surface(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), value));
}

Field Field::sample(const Grid& grid, const std::function<double(double, double)>& fn) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.nt; ++i)
    for (std::size_t j = 0; j < grid.ny; ++j)
      v[static_cast<Eigen::Index>(grid.index(i, j))] = fn(grid.t(i), grid.y(j));
  return surface(grid, std::move(v));
}

Field Field::zeros_like(const Field& layout) {
  return layout.with_values(Eigen::VectorXd::Zero(layout.values_.size()));
}

const Grid& Field::grid() const {
  if (!grid_) throw std::logic_error("field is a plain vector, not a surface");
  return *grid_;
}

double Field::at(std::size_t i, std::size_t j) const {
  return values_[static_cast<Eigen::Index>(grid().index(i, j))];
}

bool Field::same_layout(const Field& other) const {
  if (values_.size() != other.values_.size()) return false;
  if (grid_.has_value() != other.grid_.has_value()) return false;
  return !grid_ || *grid_ == *other.grid_;
}

Field Field::with_values(Eigen::VectorXd values) const {
  return grid_ ? surface(*grid_, std::move(values)) : vector(std::move(values));
}

Eigen::VectorXd Field::weights() const {
  if (!grid_) return Eigen::VectorXd::Ones(values_.size());
  const Eigen::VectorXd wt = trapezoid_weights(grid_->nt, grid_->dt);
  const Eigen::VectorXd wy = trapezoid_weights(grid_->ny, grid_->dy);
  Eigen::VectorXd w(values_.size());
  for (std::size_t i = 0; i < grid_->nt; ++i)
    for (std::size_t j = 0; j < grid_->ny; ++j)
      w[static_cast<Eigen::Index>(grid_->index(i, j))] =
          wt[static_cast<Eigen::Index>(i)] * wy[static_cast<Eigen::Index>(j)];
  return w;
}

void require_same_layout(const Field& a, const Field& b, const std::string& what) {
  if (!a.same_layout(b)) {
    std::string la = a.is_surface() ? a.grid().describe() : "vector(" + std::to_string(a.size()) + ")";
    std::string lb = b.is_surface() ? b.grid().describe() : "vector(" + std::to_string(b.size()) + ")";
    throw std::invalid_argument(what + ": shape mismatch between " + la + " and " + lb);
  }
}

double dot(const Field& a, const Field& b) {
  require_same_layout(a, b, "dot");
  if (!a.is_surface()) return a.values().dot(b.values());
  const Grid& g = a.grid();
  const Eigen::VectorXd wt = trapezoid_weights(g.nt, g.dt);
  const Eigen::VectorXd wy = trapezoid_weights(g.ny, g.dy);
  double total = 0.0;
  for (std::size_t i = 0; i < g.nt; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      const auto k = static_cast<Eigen::Index>(g.index(i, j));
      row += wy[static_cast<Eigen::Index>(j)] * a.values()[k] * b.values()[k];
    }
    total += wt[static_cast<Eigen::Index>(i)] * row;
  }
  return total;
}

double squared_norm(const Field& a) { return dot(a, a); }

double norm(const Field& a) { return std::sqrt(std::max(0.0, squared_norm(a))); }

Field operator+(const Field& a, const Field& b) {
  require_same_layout(a, b, "add");
  return a.with_values(a.values() + b.values());
}

Field operator-(const Field& a, const Field& b) {
  require_same_layout(a, b, "subtract");
  return a.with_values(a.values() - b.values());
}

Field operator*(double s, const Field& a) { return a.with_values(s * a.values()); }

Field axpy(const Field& a, double s, const Field& b) {
  require_same_layout(a, b, "axpy");
  return a.with_values(a.values() + s * b.values());
}

Field riesz_gradient(const Field& layout, const Eigen::VectorXd& partials) {
  if (static_cast<std::size_t>(partials.size()) != layout.size())
    throw std::invalid_argument("gradient length does not match field");
  if (!layout.is_surface()) return layout.with_values(partials);
  return layout.with_values(partials.cwiseQuotient(layout.weights()));
}

}  // namespace morozov
