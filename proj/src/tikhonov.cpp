#include "morozov/tikhonov.hpp"

#include <cmath>
#include <stdexcept>

namespace morozov {

void TikhonovConfig::validate(bool allow_zero_alpha) const {
  if (!(alpha > 0.0) && !(allow_zero_alpha && alpha == 0.0))
    throw std::invalid_argument("regularization parameter must be positive, got " +
                                std::to_string(alpha));
  if (!(p >= 1.0)) throw std::invalid_argument("misfit exponent p must be >= 1");
}

TikhonovEvaluation evaluate_tikhonov(const Field& x, const ForwardModel& model, const Field& ydelta,
                                     const TikhonovConfig& cfg, bool with_gradient) {
  cfg.validate(true);
  check_domain(model, x);
  const MisfitEvaluation m = model.misfit(x, ydelta, cfg.p, with_gradient);
  TikhonovEvaluation out;
  out.residual = m.residual;
  out.penalty = cfg.alpha == 0.0 ? 0.0 : cfg.penalty.value(x);
  out.value = m.value + cfg.alpha * out.penalty;
  if (with_gradient) {
    out.gradient = cfg.alpha == 0.0 ? *m.gradient
                                    : axpy(*m.gradient, cfg.alpha, cfg.penalty.gradient(x));
  }
  return out;
}

double tikhonov_value(const Field& x, const ForwardModel& model, const Field& ydelta,
                      const TikhonovConfig& cfg) {
  cfg.validate();
  return evaluate_tikhonov(x, model, ydelta, cfg, false).value;
}

}  // namespace morozov
