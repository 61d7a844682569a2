#include <gtest/gtest.h>

#include "lcq/errors.hpp"
#include "lcq/geometry_oracle.hpp"
#include "oracles.hpp"

namespace lcq {
namespace {

TEST(GeometryOracle, BallScaling) {
  for (std::size_t j = 0; j < 4; ++j)
    EXPECT_NEAR(body_quermass(ball(4, 2.0), j), oracle::unit_ball_volume(4) * std::pow(2.0, 4.0 - j), 1e-12);
}

TEST(GeometryOracle, RectangleSteinerCoefficients) {
  // area(R + eps B) = ab + 2(a + b) eps + pi eps^2 = W0 + 2 W1 eps + omega_2 eps^2
  const double a = 2.0, b = 3.0;
  const auto r = box(Eigen::Vector2d(a / 2, b / 2));
  EXPECT_NEAR(body_quermass(r, 0), a * b, 1e-12);
  EXPECT_NEAR(body_quermass(r, 1), a + b, 1e-12);
}

TEST(GeometryOracle, CubeMeanWidth) {
  // W_2 of a unit cube is (4 pi / 3) * mean half width = pi.
  EXPECT_NEAR(body_quermass(box(Eigen::Vector3d(0.5, 0.5, 0.5)), 2), oracle::kPi, 1e-12);
  EXPECT_NEAR(body_quermass(box(Eigen::Vector3d(0.5, 0.5, 0.5)), 1), 2.0, 1e-12);
}

TEST(GeometryOracle, SteinerSumWithBall) {
  const auto k = box(Eigen::Vector2d(1.0, 0.5));
  const double eps = 0.3;
  const auto sum = scaled_sum(k, ball(2, 1.0), eps);
  const double area = 2.0 * 1.0 + 2.0 * (2.0 + 1.0) * eps + oracle::kPi * eps * eps;
  EXPECT_NEAR(body_quermass(sum, 0), area, 1e-12);
  const auto balls = scaled_sum(ball(3, 1.0), ball(3, 2.0), 0.5);
  EXPECT_NEAR(body_quermass(balls, 1), body_quermass(ball(3, 2.0), 1), 1e-12);
}

TEST(GeometryOracle, RejectsUnsupported) {
  EXPECT_THROW(body_quermass(ball(3, 1.0), 4), InvalidArgument);
  EXPECT_THROW(body_quermass(scaled_sum(ball(2, 1.0), box(Eigen::Vector2d(1, 1)), 1.0), 0), InvalidArgument);
}

TEST(GeometryOracle, GaussianMoments) {
  EXPECT_NEAR(gaussian_moments(3, 0), oracle::gaussian_mass(3), 1e-12);
  EXPECT_NEAR(gaussian_moments(3, 2), 3.0 * oracle::gaussian_mass(3), 1e-12);
  EXPECT_THROW(gaussian_moments(2, 1), InvalidArgument);
}

}  // namespace
}  // namespace lcq
