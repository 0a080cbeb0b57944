#pragma once

#include "morozov/field.hpp"

#include <filesystem>
#include <iosfwd>

namespace morozov {

// Plain-text surface format:
//   nt ny dt dy t_min y_min
//   <nt rows of ny space-separated reals>
// Values are written with 17 significant digits so a write/read cycle is exact.

void write_surface(std::ostream& os, const Field& surface);
Field read_surface(std::istream& is);

void save_surface(const std::filesystem::path& path, const Field& surface);
Field load_surface(const std::filesystem::path& path);

}  // namespace morozov
