#include "morozov/surface_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace morozov {

void write_surface(std::ostream& os, const Field& surface) {
  const Grid& g = surface.grid();
  os << std::setprecision(17);
  os << g.nt << ' ' << g.ny << ' ' << g.dt << ' ' << g.dy << ' ' << g.t_min << ' ' << g.y_min
     << '\n';
  for (std::size_t i = 0; i < g.nt; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      if (j) os << ' ';
      os << surface.at(i, j);
    }
    os << '\n';
  }
}

Field read_surface(std::istream& is) {
  std::size_t nt = 0;
  std::size_t ny = 0;
  double dt = 0.0;
  double dy = 0.0;
  double t_min = 0.0;
  double y_min = 0.0;
  if (!(is >> nt >> ny >> dt >> dy >> t_min >> y_min))
    throw std::runtime_error("surface header must be: nt ny dt dy t_min y_min");
  if (nt < 2 || ny < 2) throw std::runtime_error("surface header has fewer than two nodes per axis");
  Grid g;
  g.nt = nt;
  g.ny = ny;
  g.dt = dt;
  g.dy = dy;
  g.t_min = t_min;
  g.y_min = y_min;
  g.t_max = t_min + static_cast<double>(nt - 1) * dt;
  g.y_max = y_min + static_cast<double>(ny - 1) * dy;
  // Snap extents written by Grid::from_counts back to their round values.
  for (double* e : {&g.t_max, &g.y_max}) {
    const double r = std::round(*e * 1e9) / 1e9;
    if (std::abs(r - *e) <= 1e-12 * std::max(1.0, std::abs(*e))) *e = r;
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!(is >> v[k]))
      throw std::runtime_error("surface body truncated at value " + std::to_string(k));
  }
  return Field::surface(g, std::move(v));
}

void save_surface(const std::filesystem::path& path, const Field& surface) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_surface(os, surface);
}

Field load_surface(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_surface(is);
}

}  // namespace morozov
