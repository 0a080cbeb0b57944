#include "morozov/linear_testbed.hpp"
#include "morozov/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace morozov;

namespace {

MinimizerSettings exact() {
  MinimizerSettings s;
  s.stop.max_iters = 200000;
  s.stop.rel_residual_tol = 0.0;
  s.stop.gradient_tol = 1e-13;
  return s;
}

}  // namespace

TEST(Wolfe, QuadraticLineSearchSatisfiesBothConditions) {
  // phi(t) = (t - 3)^2, phi'(0) = -6.
  const WolfeParams p{1e-4, 0.9, 50};
  const auto f = [](double t) { return (t - 3) * (t - 3); };
  const auto g = [](double t) { return 2 * (t - 3); };
  const LineSearchResult r = wolfe_line_search(f, g, p, 1.0);
  ASSERT_EQ(r.status, LineSearchStatus::converged);
  EXPECT_LE(f(r.step), f(0) + p.c1 * r.step * g(0));
  EXPECT_LE(std::abs(g(r.step)), -p.c2 * g(0));
}

TEST(Wolfe, TightCurvatureFindsNearMinimizer) {
  const WolfeParams p{1e-4, 0.01, 100};
  const auto f = [](double t) { return std::pow(t - 0.37, 4) + 0.1 * (t - 0.37) * (t - 0.37); };
  const auto g = [](double t) { return 4 * std::pow(t - 0.37, 3) + 0.2 * (t - 0.37); };
  const LineSearchResult r = wolfe_line_search(f, g, p, 10.0);
  ASSERT_EQ(r.status, LineSearchStatus::converged);
  EXPECT_LE(std::abs(g(r.step)), -p.c2 * g(0));
}

TEST(Wolfe, AscentDirectionIsRejected) {
  const auto f = [](double t) { return t * t + t; };
  const auto g = [](double t) { return 2 * t + 1; };
  EXPECT_THROW(wolfe_line_search(f, g, WolfeParams{}, 1.0), std::invalid_argument);
}

TEST(Wolfe, InvalidParametersAreRejected) {
  EXPECT_THROW((WolfeParams{0.5, 0.4, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((WolfeParams{0.0, 0.4, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((WolfeParams{0.1, 1.0, 10}.validate()), std::invalid_argument);
}

TEST(Wolfe, UnboundedBelowExhaustsWithBestDecrease) {
  const WolfeParams p{1e-4, 0.9, 12};
  const auto f = [](double t) { return -t; };
  const auto g = [](double) { return -1.0; };
  const LineSearchResult r = wolfe_line_search(f, g, p, 1.0);
  EXPECT_EQ(r.status, LineSearchStatus::exhausted);
  EXPECT_GT(r.step, 1.0);
}

TEST(InitialStep, RatioOfGradientNorms) {
  EXPECT_DOUBLE_EQ(initial_step(std::nullopt, 4.0), 1.0);
  EXPECT_DOUBLE_EQ(initial_step(8.0, 2.0), 4.0);
  EXPECT_THROW(initial_step(1.0, 0.0), std::domain_error);
}

TEST(Minimize, IdentityModelReachesClosedForm) {
  const MatrixModel id(Eigen::MatrixXd::Identity(2, 2));
  Eigen::Vector2d y(1, 0);
  const TikhonovConfig cfg{1.0, 2.0, Penalty::quadratic(Field::vector(Eigen::Vector2d::Zero()))};
  const auto s = exact();
  const RegularizedSolution sol = minimize_tikhonov(id, Field::vector(y), cfg, s.wolfe, s.stop);
  EXPECT_NEAR(sol.x[0], 0.5, 1e-10);
  EXPECT_NEAR(sol.x[1], 0.0, 1e-10);
}

TEST(Minimize, ObjectiveTraceIsNonIncreasing) {
  const auto [lm, ladder] = make_ladder_model(6, {6}, 42);
  const MatrixModel model = lm.model();
  const TikhonovConfig cfg{0.01, 2.0, Penalty::quadratic(Field::vector(Eigen::VectorXd::Zero(6)))};
  const auto s = exact();
  const RegularizedSolution sol = minimize_tikhonov(model, Field::vector(lm.y), cfg, ladder, 0, s.wolfe, s.stop);
  // Steps inside the roundoff band of the values are accepted on slope evidence.
  const auto& tr = sol.objective_trace;
  for (std::size_t k = 1; k < tr.size(); ++k)
    EXPECT_LE(tr[k], tr[k - 1] + s.wolfe.value_noise * std::abs(tr[k - 1]));
  EXPECT_LT(tr.back(), 0.5 * tr.front());
}

TEST(Wolfe, FlatValuesFallBackToSlopes) {
  // Values are frozen (pure roundoff) while the slope still carries the quadratic.
  const WolfeParams p{1e-4, 0.9, 50, 1e-10};
  const auto f = [](double) { return 1.0; };
  const auto g = [](double t) { return 1e-12 * (t - 2.0); };
  const LineSearchResult r = wolfe_line_search(f, g, p, 1.0);
  ASSERT_EQ(r.status, LineSearchStatus::converged);
  EXPECT_LE(std::abs(g(r.step)), -p.c2 * g(0));
  EXPECT_GT(r.step, 0.0);
  EXPECT_LT(r.step, 4.0);
}

TEST(Minimize, StartAlreadyOptimalReturnsImmediately) {
  const MatrixModel id(Eigen::MatrixXd::Identity(2, 2));
  const Field y = Field::vector(Eigen::Vector2d(1, 0));
  const TikhonovConfig cfg{1.0, 2.0, Penalty::quadratic(Field::vector(Eigen::Vector2d(1, 0)))};
  const auto s = exact();
  const RegularizedSolution sol = minimize_tikhonov(id, y, cfg, s.wolfe, s.stop);
  EXPECT_EQ(sol.iterations, 0u);
  EXPECT_EQ(sol.stop_reason, StopReason::gradient_zero);
}

TEST(Minimize, BandStopHaltsInsideBand) {
  // Ill-conditioned 2x2 problem: descent zigzags, so the residual decays over many steps.
  Eigen::Matrix2d a;
  a << 1.0, 0.0, 0.0, 0.05;
  const MatrixModel model(a);
  const Field y = Field::vector(Eigen::Vector2d(1, 1));
  const TikhonovConfig cfg{1e-6, 2.0, Penalty::quadratic(Field::vector(Eigen::Vector2d::Zero()))};
  const auto s = exact();
  const RegularizedSolution free_run = minimize_tikhonov(model, y, cfg, s.wolfe, s.stop);
  std::size_t hits = 0;
  for (double lo : {0.9, 0.8, 0.6, 0.4, 0.2, 0.1}) {
    auto b = s;
    b.stop.discrepancy_band = ResidualBand{lo, lo + 0.05};
    const RegularizedSolution sol = minimize_tikhonov(model, y, cfg, b.wolfe, b.stop);
    if (sol.stop_reason != StopReason::band_hit) continue;
    ++hits;
    EXPECT_GE(sol.residual, lo);
    EXPECT_LE(sol.residual, lo + 0.05);
    EXPECT_LE(sol.iterations, free_run.iterations);
  }
  EXPECT_GT(hits, 0u);
}

TEST(Minimize, IterateRespectsBoxAndLevel) {
  const MatrixModel boxed(Eigen::MatrixXd::Identity(3, 3), Box{0.0, 0.4});
  const auto ladder = DiscretizationLadder::coordinates(3, {2, 3}, Box{0.0, 0.4});
  const Field y = Field::vector(Eigen::Vector3d(1.0, 0.2, 0.9));
  const TikhonovConfig cfg{0.1, 2.0, Penalty::quadratic(Field::vector(Eigen::Vector3d::Zero()))};
  const auto s = exact();
  const RegularizedSolution sol = minimize_tikhonov(boxed, y, cfg, ladder, 0, s.wolfe, s.stop);
  EXPECT_NEAR(sol.x[0], 0.4, 1e-12);
  EXPECT_NEAR(sol.x[1], 0.2 / 1.1, 1e-8);
  EXPECT_EQ(sol.x[2], 0.0);
}

TEST(Minimize, MaxItersIsHonoured) {
  const auto [lm, ladder] = make_ladder_model(8, {8}, 3);
  const MatrixModel model = lm.model();
  const TikhonovConfig cfg{1e-4, 2.0, Penalty::quadratic(Field::vector(Eigen::VectorXd::Zero(8)))};
  auto s = exact();
  s.stop.max_iters = 3;
  const RegularizedSolution sol = minimize_tikhonov(model, Field::vector(lm.y), cfg, ladder, 0, s.wolfe, s.stop);
  EXPECT_EQ(sol.iterations, 3u);
  EXPECT_EQ(sol.stop_reason, StopReason::max_iters);
}

TEST(Minimize, ExponentOtherThanTwo) {
  // Identity in R^1, y = 1, x0 = 0, p = 1: minimizer of |x - 1| + alpha x^2 is 1/(2 alpha) for alpha > 1/2.
  const MatrixModel id(Eigen::MatrixXd::Identity(1, 1));
  const TikhonovConfig cfg{2.0, 1.0, Penalty::quadratic(Field::vector(Eigen::VectorXd::Zero(1)))};
  const auto s = exact();
  const RegularizedSolution sol = minimize_tikhonov(id, Field::vector(Eigen::VectorXd::Ones(1)), cfg, s.wolfe, s.stop);
  EXPECT_NEAR(sol.x[0], 0.25, 1e-8);
}
