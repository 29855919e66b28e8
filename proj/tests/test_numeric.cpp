#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "irbm/numeric.hpp"
#include "irbm/rng.hpp"

namespace irbm {
namespace {

TEST(Softplus, KnownValues) {
  EXPECT_DOUBLE_EQ(softplus(0.0), 0.6931471805599453);
  EXPECT_EQ(softplus(1000.0), 1000.0);
  const double tiny = softplus(-40.0);
  EXPECT_GT(tiny, 0.0);
  EXPECT_LT(tiny, 1e-17);
  // ln(1 + e^-40) = e^-40 - e^-80 / 2 + ...
  EXPECT_NEAR(tiny, std::exp(-40.0), 1e-30);
}

TEST(Softplus, OddPartIsIdentity) {
  for (double x = -30.0; x <= 30.0; x += 0.37) EXPECT_NEAR(softplus(x) - softplus(-x), x, 1e-12) << x;
}

TEST(Sigmoid, KnownValues) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(100.0), 1.0);
  EXPECT_NEAR(sigmoid(-std::log(3.0)), 0.25, 1e-15);
  EXPECT_GE(sigmoid(-1000.0), 0.0);
}

TEST(Sigmoid, IsMonotone) {
  double prev = sigmoid(-50.0);
  for (double x = -50.0; x <= 50.0; x += 0.01) {
    const double s = sigmoid(x);
    EXPECT_GE(s, prev);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    prev = s;
  }
}

TEST(Sigmoid, IsSoftplusDerivative) {
  const double h = 1e-6;
  for (double x = -20.0; x <= 20.0; x += 0.5)
    EXPECT_NEAR((softplus(x + h) - softplus(x - h)) / (2 * h), sigmoid(x), 1e-6) << x;
}

TEST(LogSumExp, KnownValues) {
  const RealVector one{-3.25};
  EXPECT_EQ(log_sum_exp(one), -3.25);
  const RealVector zeros{0.0, 0.0};
  EXPECT_DOUBLE_EQ(log_sum_exp(zeros), std::log(2.0));
  const RealVector big{1000.0, 1000.0};
  EXPECT_DOUBLE_EQ(log_sum_exp(big), 1000.0 + std::log(2.0));
}

TEST(LogSumExp, EmptyThrows) {
  const RealVector empty;
  try {
    log_sum_exp(empty);
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "empty reduction");
  }
}

TEST(LogSumExp, ShiftEquivariance) {
  RngStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    RealVector xs(1 + rng.below(10));
    for (double& x : xs) x = rng.uniform(-50, 50);
    const double c = rng.uniform(-100, 100);
    RealVector shifted = xs;
    for (double& x : shifted) x += c;
    EXPECT_NEAR(log_sum_exp(shifted), log_sum_exp(xs) + c, 1e-12 * std::max(1.0, std::abs(log_sum_exp(xs) + c)));
  }
}

TEST(Matvec, HandComputed) {
  RealMatrix eye(2, 2);
  eye(0, 0) = eye(1, 1) = 1.0;
  EXPECT_EQ(matvec(eye, RealVector{3, 4}), (RealVector{3, 4}));
  EXPECT_EQ(matvec(RealMatrix(3, 2), RealVector{5, -7}), (RealVector{0, 0, 0}));
  RealMatrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 3;
  m(1, 1) = 4;
  EXPECT_EQ(matvec(m, RealVector{1, 1}), (RealVector{3, 7}));
  const BinaryVector bits{1, 0};
  EXPECT_EQ(matvec(m, bits), (RealVector{1, 3}));
}

TEST(Matvec, ShapeMismatchThrows) {
  EXPECT_THROW(matvec(RealMatrix(2, 3), RealVector{1, 2}), std::invalid_argument);
  EXPECT_THROW(dot(RealVector{1}, RealVector{1, 2}), std::invalid_argument);
}

TEST(VecOuter, HandComputed) {
  const RealMatrix m = vec_outer(RealVector{1, 2}, RealVector{3, 4, 5});
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 3u);
  EXPECT_EQ(m.values(), (RealVector{3, 4, 5, 6, 8, 10}));
}

TEST(RealMatrix, AppendAndTruncate) {
  RealMatrix m;
  m.append_row(RealVector{1, 2});
  m.append_row(RealVector{3, 4});
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_THROW(m.append_row(RealVector{1}), std::invalid_argument);
  m.truncate_rows(1);
  EXPECT_EQ(m.rows(), 1u);
  EXPECT_EQ(m.values(), (RealVector{1, 2}));
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  RngStream a(42, 0), b(42, 0), c(42, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(Rng, UniformMoments) {
  RngStream rng(9);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // 3 sigma of the mean of U[0,1): sqrt(1/12/n)
  EXPECT_NEAR(sum / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));
}

}  // namespace
}  // namespace irbm
