#include "morozov/forward_model.hpp"

#include <cmath>
#include <sstream>

namespace morozov {

MisfitEvaluation ForwardModel::misfit(const Field& x, const Field& ydelta, double p,
                                      bool with_gradient) const {
  const Field r = apply(x) - ydelta;
  MisfitEvaluation out;
  out.residual = norm(r);
  out.value = std::pow(out.residual, p);
  if (with_gradient) {
    if (out.residual == 0.0) {
      out.gradient = Field::zeros_like(x);
    } else {
      const double scale = p * std::pow(out.residual, p - 2.0);
      out.gradient = scale * adjoint_derivative(x, r);
    }
  }
  return out;
}

void check_domain(const ForwardModel& model, const Field& x) {
  const auto box = model.bounds();
  if (!box) return;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < box->lower || x[k] > box->upper) {
      std::ostringstream os;
      os << model.name() << ": entry " << k << " = " << x[k] << " outside bounds [" << box->lower
         << ", " << box->upper << "]";
      throw DomainError(os.str(), k, x[k], *box);
    }
  }
}

Field clamp_to(const Field& x, const std::optional<Box>& box) {
  if (!box) return x;
  return x.with_values(x.values().cwiseMax(box->lower).cwiseMin(box->upper));
}

Field misfit_gradient(const ForwardModel& model, const Field& x, const Field& ydelta, double p) {
  return *model.misfit(x, ydelta, p, true).gradient;
}

MatrixModel::MatrixModel(Eigen::MatrixXd a, std::optional<Box> box, std::string name)
    : a_(std::move(a)), box_(box), name_(std::move(name)) {
  if (!a_.allFinite()) throw std::invalid_argument("matrix model has non-finite entries");
}

Field MatrixModel::apply(const Field& x) const {
  if (x.is_surface() || static_cast<Eigen::Index>(x.size()) != a_.cols())
    throw std::invalid_argument(name_ + ": input must be a vector of length " +
                                std::to_string(a_.cols()));
  return Field::vector(a_ * x.values());
}

Field MatrixModel::adjoint_derivative(const Field&, const Field& r) const {
  if (r.is_surface() || static_cast<Eigen::Index>(r.size()) != a_.rows())
    throw std::invalid_argument(name_ + ": residual must be a vector of length " +
                                std::to_string(a_.rows()));
  return Field::vector(a_.transpose() * r.values());
}

}  // namespace morozov
