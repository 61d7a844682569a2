#include <gtest/gtest.h>

#include "lcq/errors.hpp"
#include "lcq/projection.hpp"
#include "oracles.hpp"

namespace lcq {
namespace {

double value(const ConvexFunction& u, const Vector& x) {
  return value_or_inf(u, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

TEST(Projection, QuadraticClosedFormIsSchurComplement) {
  std::mt19937_64 rng(21);
  const Matrix q = oracle::random_spd(rng, 3, 0.5, 3.0);
  const auto u = ConvexFunction::quadratic(q, Vector::Zero(3));
  const auto xi = HaarSampler{8, 0}.sample(0, 3, 1);
  const GridSpec amb = GridSpec::cube(3, 3.0, 33);
  const GridSpec target = subspace_grid(amb, xi.basis());
  const auto p = project_potential(u, xi, target, subspace_grid(amb, xi.complement())).value;
  // independent: u|xi(s) = s^2 / (2 b' Q^{-1} b) for a line spanned by unit b
  const Vector b = xi.basis().col(0);
  const double k = 1.0 / b.dot(q.inverse() * b);
  for (double s : {-1.0, 0.3, 2.0}) EXPECT_NEAR(value(p, Vector::Constant(1, s)), 0.5 * k * s * s, 1e-12);
}

TEST(Projection, NumericMatchesClosedForm) {
  std::mt19937_64 rng(22);
  const Matrix q = oracle::random_spd(rng, 3, 0.5, 3.0);
  const auto u = ConvexFunction::quadratic(q, Eigen::Vector3d(0.2, -0.1, 0.0));
  const auto xi = HaarSampler{9, 0}.sample(1, 3, 2);
  const GridSpec amb = GridSpec::cube(3, 3.0, 33);
  const GridSpec target = subspace_grid(amb, xi.basis(), 17);
  const GridSpec fiber = subspace_grid(amb, xi.complement(), 33);
  const auto exact = project_potential(u, xi, target, fiber).value;
  const auto numeric = project_potential(u, xi, target, fiber, {.analytic = false}).value;
  ASSERT_TRUE(numeric.is_grid());
  double gap = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    const Vector x = target.point(k);
    if (x.norm() > 1.5) continue;
    gap = std::max(gap, std::abs(value(exact, x) - value(numeric, x)));
  }
  EXPECT_LE(gap, 1e-8);
}

TEST(Projection, BallProjectsToBall) {
  const auto u = ConvexFunction::indicator_ball(3, 1.5);
  const auto xi = HaarSampler{1, 0}.sample(0, 3, 2);
  const GridSpec amb = GridSpec::cube(3, 2.0, 17);
  const auto p = project_potential(u, xi, subspace_grid(amb, xi.basis()), subspace_grid(amb, xi.complement())).value;
  ASSERT_NE(p.get_if<IndicatorBall>(), nullptr);
  EXPECT_EQ(p.get_if<IndicatorBall>()->radius, 1.5);
  EXPECT_EQ(p.dim(), 2u);
}

TEST(Projection, BoxOnCoordinateSubspace) {
  const auto u = ConvexFunction::indicator_box(Eigen::Vector3d(1.0, 2.0, 3.0));
  const auto xi = axis_subspaces(3, 2)[1];  // axes {0, 2}
  const GridSpec amb = GridSpec::cube(3, 4.0, 17);
  const auto p = project_potential(u, xi, subspace_grid(amb, xi.basis()), subspace_grid(amb, xi.complement())).value;
  EXPECT_EQ(value(p, Eigen::Vector2d(0.9, 2.9)), 0.0);
  EXPECT_TRUE(std::isinf(value(p, Eigen::Vector2d(1.1, 0.0))));
}

TEST(Projection, WholeSpaceIsIdentity) {
  const auto u = ConvexFunction::half_squared_norm(2);
  const GridSpec g = GridSpec::cube(2, 2.0, 9);
  const auto p = project_potential(u, Subspace::whole_space(2), g, std::nullopt).value;
  EXPECT_NEAR(value(p, Eigen::Vector2d(1.0, 1.0)), 1.0, 1e-14);
}

TEST(Projection, ArgumentErrors) {
  const auto u = ConvexFunction::half_squared_norm(3);
  const auto xi = axis_subspaces(3, 1)[0];
  EXPECT_THROW(project_potential(u, xi, GridSpec::cube(1, 1.0, 5), std::nullopt), InvalidArgument);
  EXPECT_THROW(project_potential(u, xi, GridSpec::cube(2, 1.0, 5), GridSpec::cube(2, 1.0, 5)),
               DimensionMismatch);
}

TEST(Projection, FiberBoundaryMinimumWarns) {
  const auto u = ConvexFunction::quadratic(Eigen::Matrix2d{{1.0, 0.9}, {0.9, 1.0}}, Vector::Zero(2));
  const auto xi = axis_subspaces(2, 1)[0];
  const auto r = project_potential(u, xi, GridSpec::cube(1, 3.0, 17), GridSpec::cube(1, 0.5, 9), {.analytic = false});
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Projection, CommutesWithAsplundSumAndPreservesOrder) {
  const auto f = LogConcaveFunction::gaussian(2);
  const LogConcaveFunction g(ConvexFunction::quadratic(Eigen::Vector2d(2.0, 0.5).asDiagonal().toDenseMatrix(),
                                                       Vector::Zero(2), 0.5));
  const GridSpec amb = GridSpec::cube(2, 6.0, 97);
  const auto xi = HaarSampler{2, 0}.sample(0, 2, 1);
  const auto r = project_properties_check(f, g, xi, 0.6, 0.4, amb, subspace_grid(amb, xi.basis()),
                                          subspace_grid(amb, xi.complement()));
  EXPECT_LE(r.structure_residual, 3.0 * r.target_spacing);
  const LogConcaveFunction lower(add_constant(f.potential(), 0.3));
  const auto o = project_properties_check(lower, f, xi, 1.0, 1.0, amb, subspace_grid(amb, xi.basis()),
                                          subspace_grid(amb, xi.complement()));
  EXPECT_TRUE(o.ordered_input);
  EXPECT_EQ(o.order_violations, 0u);
}

TEST(Projection, DerivativeLemmaResidual) {
  const auto u = ConvexFunction::quadratic(Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal().toDenseMatrix(), Vector::Zero(3));
  const auto v = ConvexFunction::half_squared_norm(3);
  const auto xi = HaarSampler{4, 0}.sample(0, 3, 2);
  EXPECT_LE(projection_derivative_residual(u, v, xi, 0.4, Eigen::Vector2d(0.5, -0.7), 1e-3), 1e-4);
}

}  // namespace
}  // namespace lcq
