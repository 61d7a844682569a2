#include <gtest/gtest.h>

#include <random>

#include "lcq/errors.hpp"
#include "lcq/legendre.hpp"
#include "oracles.hpp"

namespace lcq {
namespace {

double value(const ConvexFunction& u, const Vector& x) {
  return value_or_inf(u, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

double max_gap(const ConvexFunction& a, const ConvexFunction& b, const GridSpec& grid,
               double radius = kInf) {
  double gap = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vector x = grid.point(k);
    if (x.lpNorm<Eigen::Infinity>() > radius) continue;
    const double va = value(a, x), vb = value(b, x);
    if (std::isinf(va) && std::isinf(vb)) continue;
    gap = std::max(gap, std::abs(va - vb));
  }
  return gap;
}

// Random convex samples: quadratic + weighted l1 + max of affine pieces,
// optionally masked outside an ellipse.
ConvexFunction random_convex_grid(std::mt19937_64& rng, const GridSpec& g, bool mask) {
  const std::size_t n = g.dim();
  const Matrix q = oracle::random_spd(rng, n, 0.1, 3.0);
  std::normal_distribution<double> normal;
  std::vector<Vector> slopes(3, Vector(static_cast<Eigen::Index>(n)));
  for (auto& s : slopes)
    for (Eigen::Index k = 0; k < s.size(); ++k) s[k] = normal(rng);
  std::vector<double> v(g.size());
  std::vector<std::uint8_t> fin(g.size(), 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vector x = g.point(k);
    double piece = -kInf;
    for (const auto& s : slopes) piece = std::max(piece, s.dot(x));
    v[k] = 0.5 * x.dot(q * x) + piece + 0.3 * x.lpNorm<1>();
    if (mask && x.dot(q * x) > 1.5 * g.axis(0).hi * g.axis(0).hi) fin[k] = 0;
  }
  return ConvexFunction::from_grid(g, std::move(v), std::move(fin));
}

struct BruteCase {
  std::size_t dim;
  std::size_t count;
  bool mask;
};

class FastVsBrute : public ::testing::TestWithParam<BruteCase> {};

TEST_P(FastVsBrute, MatchesIndependentOracleAtEveryDualNode) {
  const auto [dim, count, mask] = GetParam();
  std::mt19937_64 rng(1000 + dim * 100 + count + (mask ? 1 : 0));
  const GridSpec g = GridSpec::cube(dim, 2.0, count);
  const auto u = random_convex_grid(rng, g, mask);
  const GridSpec d = GridSpec::cube(dim, 3.0, count);
  const auto fast = conjugate(u, d).value;

  std::vector<Vector> nodes(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) nodes[k] = g.point(k);
  const auto& s = u.samples();
  double gap = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Vector y = d.point(k);
    gap = std::max(gap, std::abs(value(fast, y) - oracle::naive_conjugate(nodes, s.values, s.finite, y)));
  }
  EXPECT_LE(gap, 1e-12);
  EXPECT_LE(max_gap(fast, conjugate_bruteforce(u, d).value, d), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Grids, FastVsBrute,
                         ::testing::Values(BruteCase{1, 33, false}, BruteCase{1, 257, true},
                                           BruteCase{2, 17, false}, BruteCase{2, 33, true},
                                           BruteCase{3, 9, true}, BruteCase{3, 17, false},
                                           BruteCase{3, 33, true}));

TEST(Conjugate, HalfSquareErrorQuartersUnderRefinement) {
  auto err = [](std::size_t count) {
    const auto u = sample_to_grid(ConvexFunction::half_squared_norm(1), GridSpec::cube(1, 4.0, count));
    const GridSpec d = GridSpec::cube(1, 3.0, 257);
    return max_gap(conjugate(u, d).value, ConvexFunction::half_squared_norm(1), d);
  };
  const double coarse = err(257), fine = err(513);
  EXPECT_LE(coarse, 1e-3);
  EXPECT_LE(fine, 0.3 * coarse);
}

TEST(Conjugate, RefinementIsExactForQuadratics) {
  const auto u = sample_to_grid(ConvexFunction::half_squared_norm(2), GridSpec::cube(2, 4.0, 33));
  const GridSpec d = GridSpec::cube(2, 3.0, 29);
  EXPECT_LE(max_gap(conjugate(u, d, {.refine = true}).value, ConvexFunction::half_squared_norm(2), d), 1e-12);
}

TEST(Conjugate, ClosedFormPairs) {
  std::mt19937_64 rng(7);
  const Matrix q = oracle::random_spd(rng, 3, 0.5, 2.0);
  const Vector b = Vector::Constant(3, 0.25);
  const auto u = ConvexFunction::quadratic(q, b, 1.0);
  const auto us = *conjugate_closed_form(u);
  // u*(y) = 1/2 (y-b)' Q^{-1} (y-b) - c
  const Vector y(Eigen::Vector3d(0.3, -1.0, 2.0));
  EXPECT_NEAR(value(us, y), 0.5 * (y - b).dot(q.inverse() * (y - b)) - 1.0, 1e-12);

  const auto ball_star = *conjugate_closed_form(ConvexFunction::indicator_ball(3, 2.0, 1.0));
  EXPECT_NEAR(value(ball_star, y), 2.0 * y.norm() - 1.0, 1e-12);
  const auto box_star = *conjugate_closed_form(ConvexFunction::indicator_box(Eigen::Vector3d(1, 2, 3)));
  EXPECT_NEAR(value(box_star, y), 0.3 + 2.0 + 6.0, 1e-12);
  const auto norm_star = *conjugate_closed_form(ConvexFunction::norm_multiple(3, 2.0));
  EXPECT_EQ(value(norm_star, 0.5 * y), 0.0);
  EXPECT_TRUE(std::isinf(value(norm_star, y)));
  EXPECT_FALSE(conjugate_closed_form(sample_to_grid(u, GridSpec::cube(3, 1.0, 5))).has_value());
}

TEST(Conjugate, BiconjugationWithinLipschitzBudget) {
  const GridSpec g = GridSpec::cube(2, 3.0, 129);
  const Matrix q = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  const auto u = sample_to_grid(ConvexFunction::quadratic(q, Vector::Zero(2)), g);
  const GridSpec d = suggest_dual_grid(u, g, 129);
  const auto uss = conjugate(conjugate(u, d).value, g).value;
  const double lip = 4.0 * 1.5 * std::sqrt(2.0);
  EXPECT_LE(max_gap(uss, u, g, 1.5), 2.0 * g.max_spacing() * lip);
}

TEST(Conjugate, EdgeArgmaxWarns) {
  const auto u = sample_to_grid(ConvexFunction::half_squared_norm(1), GridSpec::cube(1, 1.0, 33));
  const auto r = conjugate(u, GridSpec::cube(1, 3.0, 33));
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Conjugate, GradientBijectionAnisotropic) {
  const GridSpec g = GridSpec::cube(2, 4.0, 129);
  const Matrix q = Eigen::Vector2d(0.5, 2.0).asDiagonal();
  const auto u = sample_to_grid(ConvexFunction::quadratic(q, Vector::Zero(2)), g);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  std::vector<Vector> pts;
  for (int k = 0; k < 32; ++k) pts.push_back(Eigen::Vector2d(unif(rng), unif(rng)));
  const auto r = gradient_bijection_check(u, pts, GridSpec::cube(2, 8.0, 129));
  EXPECT_LE(r.inverse_residual, 5.0 * g.max_spacing());
  EXPECT_LE(r.fenchel_residual, 5.0 * g.max_spacing());
}

TEST(Calculus, RightMultiplicationClosedForms) {
  const auto q = scalar_right_mul(ConvexFunction::half_squared_norm(1), 2.0);
  EXPECT_NEAR(value(q, Vector::Constant(1, 2.0)), 2.0 * 0.5, 1e-14);
  const auto b = scalar_right_mul(ConvexFunction::indicator_ball(2, 1.0), 3.0);
  EXPECT_EQ(value(b, Eigen::Vector2d(2.9, 0.0)), 0.0);
  const auto zero = scalar_right_mul(ConvexFunction::half_squared_norm(2), 0.0);
  EXPECT_TRUE(std::isinf(value(zero, Eigen::Vector2d(0.1, 0.0))));
  EXPECT_THROW(scalar_right_mul(ConvexFunction::half_squared_norm(2), -1.0), InvalidArgument);
}

TEST(Calculus, InfConvolutionClosedForms) {
  const auto balls = *inf_convolution_closed_form(ConvexFunction::indicator_ball(2, 1.0),
                                                  ConvexFunction::indicator_ball(2, 0.5));
  ASSERT_NE(balls.get_if<IndicatorBall>(), nullptr);
  EXPECT_DOUBLE_EQ(balls.get_if<IndicatorBall>()->radius, 1.5);
  const auto q = ConvexFunction::half_squared_norm(2);
  const auto qq = *inf_convolution_closed_form(q, q);
  EXPECT_NEAR(value(qq, Eigen::Vector2d(2.0, 0.0)), 1.0, 1e-14);
  const auto id = *inf_convolution_closed_form(q, ConvexFunction::point_indicator(2));
  EXPECT_NEAR(value(id, Eigen::Vector2d(1.0, 1.0)), 1.0, 1e-14);
}

TEST(Calculus, InfConvolutionDualRouteVsBruteForce) {
  const GridSpec g = GridSpec::cube(2, 2.0, 33);
  const auto u = sample_to_grid(ConvexFunction::quadratic(Eigen::Vector2d(1.0, 3.0).asDiagonal().toDenseMatrix(),
                                                          Vector::Zero(2)),
                                g);
  const auto v = sample_to_grid(ConvexFunction::weighted_l1(Eigen::Vector2d(0.5, 1.0)), g);
  const auto dual = inf_convolution(u, v, g).value;
  const auto brute = inf_convolution_bruteforce(u, v, g, g);
  // brute force is an upper bound that converges at O(h) in the interior
  EXPECT_LE(max_gap(dual, brute, g, 1.0), 2.0 * g.max_spacing());
}

TEST(Calculus, InfConvolutionOfIndicatorsRecoversMinkowskiSum) {
  const GridSpec g = GridSpec::cube(2, 2.0, 65);
  const auto u = sample_to_grid(ConvexFunction::indicator_box(Eigen::Vector2d(0.5, 0.25)), g);
  const auto v = sample_to_grid(ConvexFunction::indicator_box(Eigen::Vector2d(0.5, 0.5)), g);
  const auto w = inf_convolution(u, v, g).value;
  EXPECT_NEAR(value(w, Eigen::Vector2d(0.95, 0.7)), 0.0, 1e-9);
  EXPECT_TRUE(std::isinf(value(w, Eigen::Vector2d(1.1, 0.0))));
  EXPECT_TRUE(std::isinf(value(w, Eigen::Vector2d(0.0, 0.85))));
}

TEST(Calculus, AsplundRoutesAgreeOnGaussians) {
  const auto u = ConvexFunction::half_squared_norm(2);
  const auto v = ConvexFunction::quadratic(Eigen::Vector2d(2.0, 0.5).asDiagonal().toDenseMatrix(), Vector::Zero(2));
  const GridSpec g = GridSpec::cube(2, 5.0, 97);
  const auto a = asplund_potential(u, v, 0.7, 0.4, g, Route::analytic).value;
  const auto b = asplund_potential(u, v, 0.7, 0.4, g, Route::grid).value;
  EXPECT_LE(max_gap(a, b, g, 2.5), 1e-9);
}

TEST(Calculus, AsplundDegenerateWeights) {
  const auto u = ConvexFunction::half_squared_norm(1);
  const GridSpec g = GridSpec::cube(1, 3.0, 33);
  const auto r = asplund_potential(u, ConvexFunction::indicator_ball(1, 1.0), 1.0, 0.0, g).value;
  EXPECT_NEAR(value(r, Vector::Constant(1, 2.0)), 2.0, 1e-12);
}

TEST(Calculus, AsplundPathMonotoneAndConvergent) {
  const auto u = ConvexFunction::half_squared_norm(2);
  const auto v = ConvexFunction::indicator_box(Eigen::Vector2d(1.0, 0.5));
  const AsplundPath path(u, v, GridSpec::cube(2, 3.0, 97));
  const Vector x = Eigen::Vector2d(0.9, -0.4);
  double last = kInf, last_err = kInf;
  for (double t : {0.025, 0.05, 0.1, 0.2, 0.4}) {
    const double ut = value(path.at(t).value, x);
    EXPECT_LE(ut, last + 1e-12);
    last = ut;
  }
  for (double t : {0.1, 0.05, 0.025}) {
    const double err = std::abs(value(path.at(t).value, x) - value(u, x));
    EXPECT_LT(err, last_err);
    last_err = err;
  }
}

TEST(Calculus, SupportFunctionAdditiveUnderAsplundSum) {
  const auto f = LogConcaveFunction::gaussian(2);
  const LogConcaveFunction g(ConvexFunction::quadratic(Eigen::Vector2d(2.0, 0.5).asDiagonal().toDenseMatrix(),
                                                       Vector::Zero(2)));
  const GridSpec box = GridSpec::cube(2, 6.0, 97);
  const GridSpec dual = GridSpec::cube(2, 1.5, 31);
  const auto sum = asplund_sum(f, g, 1.0, 1.0, box, Route::grid).value;
  const auto lhs = support_function(sum, dual).value;
  const auto rhs = add_on_grid(support_function(f, dual).value, support_function(g, dual).value, dual);
  EXPECT_LE(max_gap(lhs, rhs, dual), 1e-6);
}

TEST(Calculus, DerivativeLemmaResiduals) {
  const auto u = ConvexFunction::quadratic(Eigen::Vector2d(1.0, 4.0).asDiagonal().toDenseMatrix(), Vector::Zero(2));
  const auto v = ConvexFunction::quadratic(Eigen::Vector2d(0.5, 2.0).asDiagonal().toDenseMatrix(), Vector::Zero(2));
  for (double t : {0.1, 0.5, 1.0})
    EXPECT_LE(asplund_derivative_residual(u, v, t, Eigen::Vector2d(0.3, 1.1), 1e-3), 1e-4);
}

}  // namespace
}  // namespace lcq
