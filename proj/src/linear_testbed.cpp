#include "morozov/linear_testbed.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace morozov {

namespace {

Eigen::MatrixXd gaussian(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = g(rng);
  return m;
}

Eigen::MatrixXd orthogonal(std::size_t n, std::mt19937_64& rng) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, n, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                       static_cast<Eigen::Index>(n));
}

Eigen::VectorXd spectrum(std::size_t n, double max_condition, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd s(static_cast<Eigen::Index>(n));
  const double scale = 1.0 / std::sqrt(max_condition);
  for (auto& x : s) x = scale * std::pow(max_condition, u(rng));
  // Pin the extremes so the condition number is exactly max_condition.
  if (n >= 2) {
    s[0] = scale * max_condition;
    s[static_cast<Eigen::Index>(n - 1)] = scale;
  }
  return s;
}

}  // namespace

MatrixModel LinearModel::model(std::optional<Box> box) const {
  return MatrixModel(a, box, "linear");
}

double LinearModel::condition_number() const {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

Eigen::VectorXd closed_form_minimizer(const Eigen::MatrixXd& a, const Eigen::VectorXd& ydelta,
                                      double alpha, const Eigen::VectorXd& x0) {
  if (!(alpha > 0.0)) throw std::invalid_argument("closed-form minimizer needs alpha > 0");
  if (a.rows() != ydelta.size() || a.cols() != x0.size())
    throw std::invalid_argument("closed-form minimizer: dimension mismatch");
  Eigen::MatrixXd normal = a.transpose() * a;
  normal.diagonal().array() += alpha;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("normal equations are singular");
  return ldlt.solve(a.transpose() * ydelta + alpha * x0);
}

std::pair<LinearModel, DiscretizationLadder> make_ladder_model(
    std::size_t n, const std::vector<std::size_t>& dims, std::uint64_t seed,
    const LadderModelOptions& options) {
  if (n == 0) throw std::invalid_argument("model dimension must be positive");
  if (!(options.max_condition >= 1.0)) throw std::invalid_argument("max_condition must be >= 1");
  std::mt19937_64 rng(seed);
  LinearModel lm;
  const auto N = static_cast<Eigen::Index>(n);
  if (options.identity) {
    lm.a = Eigen::MatrixXd::Identity(N, N);
  } else {
    const Eigen::MatrixXd u = orthogonal(n, rng);
    const Eigen::MatrixXd v = orthogonal(n, rng);
    lm.a = u * spectrum(n, options.max_condition, rng).asDiagonal() * v.transpose();
  }
  lm.xdagger = gaussian(n, 1, rng).col(0);
  lm.y = lm.a * lm.xdagger;
  return {lm, DiscretizationLadder::coordinates(n, dims)};
}

LinearModel make_spd_source_model(std::size_t n, std::uint64_t seed, double max_condition) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd q = orthogonal(n, rng);
  LinearModel lm;
  lm.a = q * spectrum(n, max_condition, rng).asDiagonal() * q.transpose();
  lm.a = 0.5 * (lm.a + lm.a.transpose());
  const Eigen::VectorXd w = gaussian(n, 1, rng).col(0);
  lm.xdagger = lm.a * w;
  lm.y = lm.a * lm.xdagger;
  return lm;
}

Eigen::VectorXd noise_of_norm(std::size_t n, double delta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd e = gaussian(n, 1, rng).col(0);
  return delta * e / e.norm();
}

}  // namespace morozov
