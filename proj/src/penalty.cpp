#include "morozov/penalty.hpp"

#include "morozov/interpolation.hpp"

#include <cmath>
#include <stdexcept>

namespace morozov {

namespace {

// Forward difference along y, last column repeats the previous difference.
Eigen::VectorXd diff_y(const Grid& g, const Eigen::VectorXd& d) {
  Eigen::VectorXd out(d.size());
  for (std::size_t i = 0; i < g.nt; ++i) {
    for (std::size_t j = 0; j + 1 < g.ny; ++j) {
      out[static_cast<Eigen::Index>(g.index(i, j))] =
          (d[static_cast<Eigen::Index>(g.index(i, j + 1))] - d[static_cast<Eigen::Index>(g.index(i, j))]) /
          g.dy;
    }
    out[static_cast<Eigen::Index>(g.index(i, g.ny - 1))] =
        out[static_cast<Eigen::Index>(g.index(i, g.ny - 2))];
  }
  return out;
}

Eigen::VectorXd diff_y_transpose(const Grid& g, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (std::size_t i = 0; i < g.nt; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      double c = v[static_cast<Eigen::Index>(g.index(i, j))] / g.dy;
      const std::size_t jj = j + 1 < g.ny ? j : g.ny - 2;
      out[static_cast<Eigen::Index>(g.index(i, jj + 1))] += c;
      out[static_cast<Eigen::Index>(g.index(i, jj))] -= c;
    }
  }
  return out;
}

Eigen::VectorXd diff_t(const Grid& g, const Eigen::VectorXd& d) {
  Eigen::VectorXd out(d.size());
  for (std::size_t i = 0; i < g.nt; ++i) {
    const std::size_t ii = i + 1 < g.nt ? i : g.nt - 2;
    for (std::size_t j = 0; j < g.ny; ++j) {
      out[static_cast<Eigen::Index>(g.index(i, j))] =
          (d[static_cast<Eigen::Index>(g.index(ii + 1, j))] - d[static_cast<Eigen::Index>(g.index(ii, j))]) /
          g.dt;
    }
  }
  return out;
}

Eigen::VectorXd diff_t_transpose(const Grid& g, const Eigen::VectorXd& v) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (std::size_t i = 0; i < g.nt; ++i) {
    const std::size_t ii = i + 1 < g.nt ? i : g.nt - 2;
    for (std::size_t j = 0; j < g.ny; ++j) {
      const double c = v[static_cast<Eigen::Index>(g.index(i, j))] / g.dt;
      out[static_cast<Eigen::Index>(g.index(ii + 1, j))] += c;
      out[static_cast<Eigen::Index>(g.index(ii, j))] -= c;
    }
  }
  return out;
}

struct EffectiveBetas {
  double b1, b2, b3;
};

EffectiveBetas effective(const H1Weights& w, const Grid& g) {
  if (!w.scale_by_steps) return {w.beta1, w.beta2, w.beta3};
  return {w.beta1, w.beta2 * g.dy, w.beta3 * g.dt};
}

}  // namespace

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::quadratic:
      return "quadratic";
    case PenaltyKind::weighted_h1:
      return "weighted-h1";
    case PenaltyKind::kullback_leibler:
      return "kullback-leibler";
  }
  return "unknown";
}

PenaltyKind penalty_kind_from_string(const std::string& name) {
  if (name == "quadratic") return PenaltyKind::quadratic;
  if (name == "weighted-h1" || name == "h1") return PenaltyKind::weighted_h1;
  if (name == "kullback-leibler" || name == "kl") return PenaltyKind::kullback_leibler;
  throw std::invalid_argument("unknown penalty kind '" + name + "'");
}

Penalty::Penalty(PenaltyKind kind, Field prior, H1Weights weights)
    : kind_(kind), prior_(std::move(prior)), weights_(weights) {}

Penalty Penalty::quadratic(Field prior) { return {PenaltyKind::quadratic, std::move(prior), {}}; }

Penalty Penalty::weighted_h1(Field prior, H1Weights weights) {
  if (!prior.is_surface()) throw std::invalid_argument("weighted-h1 penalty needs a surface prior");
  if (weights.beta1 < 0.0 || weights.beta2 < 0.0 || weights.beta3 < 0.0)
    throw std::invalid_argument("weighted-h1 weights must be non-negative");
  return {PenaltyKind::weighted_h1, std::move(prior), weights};
}

Penalty Penalty::kullback_leibler(Field prior) {
  Penalty p{PenaltyKind::kullback_leibler, std::move(prior), {}};
  p.check_positive(p.prior_, "prior");
  return p;
}

Field Penalty::prior_for(const Field& x) const {
  if (x.is_surface() && prior_.is_surface() && x.grid() != prior_.grid())
    return interpolate(prior_, x.grid());
  require_same_layout(x, prior_, "penalty");
  return prior_;
}

void Penalty::check_positive(const Field& x, const char* what) const {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0)) {
      std::string where = "entry " + std::to_string(k);
      if (x.is_surface()) {
        const Grid& g = x.grid();
        where = "node (" + std::to_string(k / g.ny) + ", " + std::to_string(k % g.ny) + ")";
      }
      throw std::domain_error(std::string("kullback-leibler penalty needs positive ") + what +
                              "; got " + std::to_string(x[k]) + " at " + where);
    }
  }
}

double Penalty::value(const Field& x) const {
  const Field x0 = prior_for(x);
  switch (kind_) {
    case PenaltyKind::quadratic:
      return squared_norm(x - x0);
    case PenaltyKind::weighted_h1: {
      const Grid& g = x.grid();
      const EffectiveBetas b = effective(weights_, g);
      const Eigen::VectorXd d = x.values() - x0.values();
      double v = b.b1 * squared_norm(x.with_values(d));
      if (b.b2 != 0.0) v += b.b2 * squared_norm(x.with_values(diff_y(g, d)));
      if (b.b3 != 0.0) v += b.b3 * squared_norm(x.with_values(diff_t(g, d)));
      return v;
    }
    case PenaltyKind::kullback_leibler: {
      check_positive(x, "argument");
      const Eigen::VectorXd& xv = x.values();
      const Eigen::VectorXd& pv = x0.values();
      Eigen::VectorXd integrand(xv.size());
      for (Eigen::Index k = 0; k < xv.size(); ++k)
        integrand[k] = std::log(xv[k] / pv[k]) + xv[k] - pv[k];
      return x.weights().dot(integrand);
    }
  }
  throw std::logic_error("unreachable penalty kind");
}

Field Penalty::gradient(const Field& x) const {
  const Field x0 = prior_for(x);
  switch (kind_) {
    case PenaltyKind::quadratic:
      return 2.0 * (x - x0);
    case PenaltyKind::weighted_h1: {
      const Grid& g = x.grid();
      const EffectiveBetas b = effective(weights_, g);
      const Eigen::VectorXd w = x.weights();
      const Eigen::VectorXd d = x.values() - x0.values();
      // Euclidean partials of the quadratic form, then Riesz map.
      Eigen::VectorXd partials = 2.0 * b.b1 * w.cwiseProduct(d);
      if (b.b2 != 0.0)
        partials += 2.0 * b.b2 * diff_y_transpose(g, w.cwiseProduct(diff_y(g, d)));
      if (b.b3 != 0.0)
        partials += 2.0 * b.b3 * diff_t_transpose(g, w.cwiseProduct(diff_t(g, d)));
      return riesz_gradient(x, partials);
    }
    case PenaltyKind::kullback_leibler: {
      check_positive(x, "argument");
      return x.with_values((x.values().array().inverse() + 1.0).matrix());
    }
  }
  throw std::logic_error("unreachable penalty kind");
}

double penalty_value(const Penalty& penalty, const Field& x) { return penalty.value(x); }

Field penalty_subgradient(const Penalty& penalty, const Field& x) { return penalty.gradient(x); }

}  // namespace morozov
