#include "morozov/interpolation.hpp"

#include <algorithm>
#include <cmath>

namespace morozov {

BilinearTransfer::BilinearTransfer(const Grid& source, const Grid& target)
    : source_(source), target_(target) {
  source.validate();
  target.validate();
  if (!source.covers(target))
    throw std::invalid_argument("interpolation target " + target.describe() +
                                " exceeds source extents " + source.describe());
  t_axis_ = axis(source.t_min, source.dt, source.nt, target, true);
  y_axis_ = axis(source.y_min, source.dy, source.ny, target, false);
}

std::vector<BilinearTransfer::AxisStencil> BilinearTransfer::axis(double origin, double h,
                                                                  std::size_t n, const Grid& target,
                                                                  bool time_axis) {
  const std::size_t m = time_axis ? target.nt : target.ny;
  std::vector<AxisStencil> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = time_axis ? target.t(k) : target.y(k);
    double s = (x - origin) / h;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    const double r = std::round(s);
    if (std::abs(s - r) <= 1e-9) {
      const auto node = static_cast<std::size_t>(r);
      out[k] = {node, node, 0.0};
      continue;
    }
    auto lo = static_cast<std::size_t>(std::floor(s));
    if (lo >= n - 1) lo = n - 2;
    out[k] = {lo, lo + 1, s - static_cast<double>(lo)};
  }
  return out;
}

Eigen::VectorXd BilinearTransfer::apply(const Eigen::VectorXd& src) const {
  if (static_cast<std::size_t>(src.size()) != source_.size())
    throw std::invalid_argument("transfer input does not match source grid");
  Eigen::VectorXd out(static_cast<Eigen::Index>(target_.size()));
  for (std::size_t i = 0; i < target_.nt; ++i) {
    const AxisStencil& st = t_axis_[i];
    for (std::size_t j = 0; j < target_.ny; ++j) {
      const AxisStencil& sy = y_axis_[j];
      const auto at = [&](std::size_t a, std::size_t b) {
        return src[static_cast<Eigen::Index>(source_.index(a, b))];
      };
      double row_lo = at(st.lo, sy.lo);
      if (sy.w_hi != 0.0) row_lo = (1.0 - sy.w_hi) * row_lo + sy.w_hi * at(st.lo, sy.hi);
      double v = row_lo;
      if (st.w_hi != 0.0) {
        double row_hi = at(st.hi, sy.lo);
        if (sy.w_hi != 0.0) row_hi = (1.0 - sy.w_hi) * row_hi + sy.w_hi * at(st.hi, sy.hi);
        v = (1.0 - st.w_hi) * row_lo + st.w_hi * row_hi;
      }
      out[static_cast<Eigen::Index>(target_.index(i, j))] = v;
    }
  }
  return out;
}

Eigen::VectorXd BilinearTransfer::apply_transpose(const Eigen::VectorXd& tgt) const {
  if (static_cast<std::size_t>(tgt.size()) != target_.size())
    throw std::invalid_argument("transfer transpose input does not match target grid");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(source_.size()));
  for (std::size_t i = 0; i < target_.nt; ++i) {
    const AxisStencil& st = t_axis_[i];
    for (std::size_t j = 0; j < target_.ny; ++j) {
      const AxisStencil& sy = y_axis_[j];
      const double g = tgt[static_cast<Eigen::Index>(target_.index(i, j))];
      const auto add = [&](std::size_t a, std::size_t b, double w) {
        if (w != 0.0) out[static_cast<Eigen::Index>(source_.index(a, b))] += w * g;
      };
      add(st.lo, sy.lo, (1.0 - st.w_hi) * (1.0 - sy.w_hi));
      add(st.lo, sy.hi, (1.0 - st.w_hi) * sy.w_hi);
      add(st.hi, sy.lo, st.w_hi * (1.0 - sy.w_hi));
      add(st.hi, sy.hi, st.w_hi * sy.w_hi);
    }
  }
  return out;
}

Field BilinearTransfer::apply(const Field& u) const {
  if (u.grid() != source_) throw std::invalid_argument("field is not on the transfer's source grid");
  return Field::surface(target_, apply(u.values()));
}

Field interpolate(const Field& u, const Grid& target) {
  if (u.grid() == target) return u;
  return BilinearTransfer(u.grid(), target).apply(u);
}

}  // namespace morozov
