#include <gtest/gtest.h>

#include <cmath>

#include "faultline/random.hpp"
#include "faultline/stats.hpp"
#include "oracles.hpp"

using namespace faultline;

TEST(Pearson, PerfectLines) {
  EXPECT_DOUBLE_EQ(stats::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0);
  EXPECT_DOUBLE_EQ(stats::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0);
  EXPECT_THROW(stats::pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
               PreconditionError);
  EXPECT_THROW(stats::pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
               PreconditionError);
}

TEST(Pearson, MatchesOracleAndIsAffineInvariant) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(5 + uniform_index(rng, 50)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = uniform_real(rng) * 10;
      y[i] = 0.3 * x[i] + uniform_real(rng);
    }
    const double r = stats::pearson(x, y);
    ASSERT_NEAR(r, oracle::pearson(x, y), 1e-12);
    std::vector<double> x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = 7.5 * x[i] - 100;
    ASSERT_NEAR(stats::pearson(x2, y), r, 1e-12);
  }
}

TEST(Spearman, RanksWithTies) {
  EXPECT_EQ(stats::ranks(std::vector<double>{10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
  EXPECT_DOUBLE_EQ(stats::spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 4, 9, 16}), 1.0);
}

TEST(Descriptive, MeanAndPopulationStd) {
  EXPECT_DOUBLE_EQ(stats::mean(std::vector<double>{1, 2, 3, 6}), 3.0);
  EXPECT_DOUBLE_EQ(stats::population_stddev(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}), 2.0);
  EXPECT_THROW(stats::mean(std::vector<double>{}), PreconditionError);
}

TEST(CramersV, IdenticalIndependentAndSymmetric) {
  std::vector<std::size_t> a{0, 1, 2, 0, 1, 2, 1, 1};
  EXPECT_NEAR(stats::cramers_v(a, a), 1.0, 1e-12);
  std::vector<std::size_t> relabeled;
  for (auto v : a) relabeled.push_back((v + 1) % 3 + 7);
  EXPECT_NEAR(stats::cramers_v(a, relabeled), 1.0, 1e-12);
  std::vector<std::size_t> b{1, 0, 0, 1, 1, 0, 0, 1};
  EXPECT_DOUBLE_EQ(stats::cramers_v(a, b), stats::cramers_v(b, a));
  EXPECT_EQ(stats::cramers_v(a, std::vector<std::size_t>(8, 4)), 0.0);

  Rng rng(10);
  std::vector<std::size_t> x(10000), y(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = uniform_index(rng, 4);
    y[i] = uniform_index(rng, 3);
  }
  EXPECT_LT(stats::cramers_v(x, y), 0.05);
}

TEST(CramersV, HandTable) {
  // 2x2 table [[3,1],[1,3]]: chi2 = 2, n = 8, V = 0.5.
  std::vector<std::size_t> a{0, 0, 0, 0, 1, 1, 1, 1}, b{0, 0, 0, 1, 0, 1, 1, 1};
  EXPECT_NEAR(stats::cramers_v(a, b), 0.5, 1e-12);
}

TEST(LeastSquares, IdentityAndTwoByTwo) {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3);
  y << 1.5, -2, 7;
  EXPECT_LT((stats::solve_least_squares(id, y, 0) - y).norm(), 1e-12);
  Eigen::MatrixXd x(2, 2);
  x << 2, 1, 1, 3;
  Eigen::VectorXd t(2);
  t << 3, 5;
  const auto b = stats::solve_least_squares(x, t, 0);
  EXPECT_NEAR(b(0), 0.8, 1e-10);
  EXPECT_NEAR(b(1), 1.4, 1e-10);
}

TEST(LeastSquares, ResidualOrthogonalAndRidgeLimits) {
  Rng rng(6);
  Eigen::MatrixXd x(40, 4);
  Eigen::VectorXd y(40);
  for (Eigen::Index r = 0; r < 40; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) x(r, c) = uniform_real(rng);
    y(r) = uniform_real(rng);
  }
  const auto b = stats::solve_least_squares(x, y, 0);
  EXPECT_LT((x.transpose() * (y - x * b)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(stats::solve_least_squares(x, y, 1e12).norm(), 1e-9);

  Eigen::MatrixXd singular(3, 2);
  singular << 1, 2, 2, 4, 3, 6;
  Eigen::VectorXd z(3);
  z << 1, 2, 3;
  EXPECT_THROW(stats::solve_least_squares(singular, z, 0), PreconditionError);
  EXPECT_NO_THROW(stats::solve_least_squares(singular, z, 1e-8));
}
