#include "morozov/interpolation.hpp"
#include "morozov/synthdata.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace morozov;

namespace {

const Grid kFine = Grid::from_steps(0.0025, 0.01);
const Grid kCoarse = Grid::from_steps(0.02, 0.1);

Field noisy(const Field& base, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sd);
  Eigen::VectorXd v = base.values();
  for (auto& x : v) x += n(rng);
  return base.with_values(v);
}

}  // namespace

TEST(Simpson, AreaOddAndQuadratic) {
  const Grid g = Grid::from_counts(101, 101);
  EXPECT_NEAR(simpson_2d(Field::constant(g, 1.0)).value, 10.0, 1e-12);
  EXPECT_NEAR(simpson_2d(Field::sample(g, [](double, double y) { return y; })).value, 0.0, 1e-12);
  EXPECT_NEAR(simpson_2d(Field::sample(g, [](double, double y) { return y * y; })).value, 250.0 / 3.0, 1e-6);
  EXPECT_FALSE(simpson_2d(Field::constant(g, 1.0)).trapezoid_closure);
}

TEST(Simpson, ExactForTensorCubics) {
  const Grid g = Grid::from_counts(5, 7);
  const auto f = [](double t, double y) { return (1 + 2 * t - t * t + 3 * t * t * t) * (2 - y + 0.5 * y * y * y + y * y); };
  // t-part integral over [0,1]: 1 + 1 - 1/3 + 3/4; y-part over [-5,5]: 20 + 250/3.
  const double exact = (1.0 + 1.0 - 1.0 / 3.0 + 0.75) * (20.0 + 250.0 / 3.0);
  EXPECT_LE(std::abs(simpson_2d(Field::sample(g, f)).value - exact), 1e-10 * exact);
}

TEST(Simpson, EvenCountsUseClosureAndTinyGridsFail) {
  const Grid even = Grid::from_counts(4, 6);
  const SimpsonResult r = simpson_2d(Field::constant(even, 2.0));
  EXPECT_TRUE(r.trapezoid_closure);
  EXPECT_NEAR(r.value, 20.0, 1e-12);
  EXPECT_THROW(simpson_2d(Field::constant(Grid::from_counts(2, 5), 1.0)), std::invalid_argument);
}

TEST(NoiseLevel, ConstantOffset) {
  for (const Grid& g : {Grid::from_counts(11, 21), Grid::from_counts(12, 20)}) {
    const Field u = Field::sample(g, [](double t, double y) { return std::sin(t) * y; });
    for (double c : {0.01, -0.3}) {
      const Field shifted = u.with_values(u.values().array() + c);
      EXPECT_NEAR(estimate_noise_level(u, shifted), std::abs(c) * std::sqrt(10.0), 1e-10);
      EXPECT_NEAR(estimate_noise_level(u, shifted, NoiseEvaluation::fine_grid), std::abs(c) * std::sqrt(10.0), 1e-10);
    }
  }
}

TEST(NoiseLevel, SelfInterpolationIsZero) {
  const Grid fine = Grid::from_steps(0.01, 0.05);
  const Field u = Field::sample(fine, [](double t, double y) { return std::exp(-t) * std::cos(y); });
  const Field coarse = interpolate(u, Grid::from_steps(0.02, 0.1));
  EXPECT_LE(estimate_noise_level(u, coarse), 1e-12);
  EXPECT_LE(estimate_noise_level(u, interpolate(u, fine), NoiseEvaluation::fine_grid), 1e-12);
}

TEST(NoiseLevel, TriangleInequality) {
  const Grid g = Grid::from_counts(21, 41);
  const Field base = Field::sample(g, [](double t, double y) { return t * y; });
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Field v = noisy(base, 0.05, 100 + s);
    const Field w = noisy(base, 0.02, 200 + s);
    EXPECT_LE(estimate_noise_level(base, w),
              estimate_noise_level(base, v) + estimate_noise_level(v, w) + 1e-10);
  }
}

TEST(NoiseEvaluationNames, RoundTrip) {
  for (auto e : {NoiseEvaluation::data_nodes, NoiseEvaluation::fine_grid})
    EXPECT_EQ(noise_evaluation_from_string(to_string(e)), e);
  EXPECT_THROW(noise_evaluation_from_string("everywhere"), std::invalid_argument);
}

TEST(Generate, NoNoiseShrinksWithRefinement) {
  const Grid fine = Grid::from_steps(0.005, 0.02);
  const Field a = pde::true_coefficient(fine);
  const double d1 = generate_data(a, pde::PdeParams{}, fine, Grid::from_steps(0.1, 0.5), 0.0, 1,
                                  NoiseEvaluation::fine_grid).delta;
  const double d2 = generate_data(a, pde::PdeParams{}, fine, Grid::from_steps(0.02, 0.1), 0.0, 1,
                                  NoiseEvaluation::fine_grid).delta;
  const double d3 = generate_data(a, pde::PdeParams{}, fine, fine, 0.0, 1, NoiseEvaluation::fine_grid).delta;
  EXPECT_GT(d1, d2);
  EXPECT_LE(d3, 1e-12);
  EXPECT_EQ(generate_data(a, pde::PdeParams{}, fine, Grid::from_steps(0.02, 0.1), 0.0, 1).delta, 0.0);
}

TEST(Generate, DeterministicPerSeed) {
  const Grid fine = Grid::from_steps(0.005, 0.02);
  const Field a = pde::true_coefficient(fine);
  const NoisyDataset d1 = generate_data(a, pde::PdeParams{}, fine, kCoarse, 0.01, 9);
  const NoisyDataset d2 = generate_data(a, pde::PdeParams{}, fine, kCoarse, 0.01, 9);
  const NoisyDataset d3 = generate_data(a, pde::PdeParams{}, fine, kCoarse, 0.01, 10);
  EXPECT_TRUE(d1.u_delta.values() == d2.u_delta.values());
  EXPECT_EQ(d1.delta, d2.delta);
  EXPECT_FALSE(d1.u_delta.values() == d3.u_delta.values());
  EXPECT_EQ(d1.delta, estimate_noise_level(d1.u_clean_fine, d1.u_delta));
  EXPECT_TRUE(d1.u_delta.grid() == kCoarse);
}

TEST(Generate, RejectsBadInput) {
  const Field a = pde::true_coefficient(kCoarse);
  EXPECT_THROW(generate_data(a, pde::PdeParams{}, kCoarse, kCoarse, -1.0, 1), std::invalid_argument);
  const Grid outside = Grid::from_counts(5, 5, 0.0, 2.0, -5.0, 5.0);
  EXPECT_THROW(generate_data(a, pde::PdeParams{}, kCoarse, outside, 0.01, 1), std::invalid_argument);
}

TEST(Generate, MonteCarloNoiseLevelOnSweepMeshes) {
  const Field a = pde::true_coefficient(kFine);
  const Field clean = pde::solve_forward(a, pde::PdeParams{}, kFine);
  const double target = 0.01 * std::sqrt(10.0);
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const NoisyDataset d = generate_data(a, pde::PdeParams{}, kFine, kCoarse, 0.01, seed);
    EXPECT_GT(d.delta, 0.0);
    EXPECT_NEAR(d.delta, target, 0.15 * target) << "seed " << seed;
    sum += d.delta;
  }
  EXPECT_NEAR(sum / 50.0, target, 0.15 * target);
}

TEST(Dataset, SaveLoadRoundTrip) {
  const Grid fine = Grid::from_steps(0.01, 0.05);
  const NoisyDataset d = generate_data(pde::true_coefficient(fine), pde::PdeParams{}, fine,
                                       Grid::from_steps(0.05, 0.25), 0.01, 4, NoiseEvaluation::fine_grid);
  const auto dir = std::filesystem::temp_directory_path() / "morozov_dataset_rt";
  std::filesystem::remove_all(dir);
  save_dataset(dir, d);
  const NoisyDataset back = load_dataset(dir);
  EXPECT_TRUE(back.u_delta.values() == d.u_delta.values());
  EXPECT_TRUE(back.u_clean_fine.values() == d.u_clean_fine.values());
  EXPECT_EQ(back.delta, d.delta);
  EXPECT_EQ(back.seed, d.seed);
  EXPECT_EQ(back.noise_std, d.noise_std);
  EXPECT_EQ(back.evaluation, d.evaluation);
  EXPECT_TRUE(back.fine_grid == d.fine_grid);
  EXPECT_TRUE(back.coarse_grid == d.coarse_grid);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_dataset(dir), std::runtime_error);
}
