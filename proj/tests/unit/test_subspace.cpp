#include <gtest/gtest.h>

#include <algorithm>

#include "lcq/errors.hpp"
#include "lcq/subspace.hpp"
#include "oracles.hpp"

namespace lcq {
namespace {

TEST(Subspace, ValidatesOrthonormality) {
  Matrix b(2, 1), c(2, 1);
  b << 1.0, 0.0;
  c << 1.0, 1.0;
  EXPECT_THROW(Subspace(b, c), InvalidArgument);
  const auto s = Subspace::from_basis(Eigen::Vector3d(0.0, 0.6, 0.8));
  EXPECT_EQ(s.complement().cols(), 2);
  EXPECT_LE(s.orthonormality_residual(), 1e-12);
  EXPECT_TRUE(Subspace::whole_space(3).is_identity());
}

TEST(Subspace, AxisSubspaces) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(3, 0), 1u);
  const auto planes = axis_subspaces(4, 2);
  ASSERT_EQ(planes.size(), 6u);
  for (const auto& p : planes) EXPECT_TRUE(p.is_axis_aligned());
  EXPECT_EQ(planes.front().basis()(0, 0), 1.0);
  EXPECT_EQ(planes.front().basis()(1, 1), 1.0);
}

TEST(Haar, CounterBasedDeterminism) {
  const HaarSampler s{99, 0};
  const auto a = s.sample(17, 4, 2).basis();
  const auto b = s.sample(17, 4, 2).basis();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, s.sample(18, 4, 2).basis());
  const auto batch = haar_samples(99, 20, 4, 2);
  EXPECT_EQ(batch[17].basis(), a);
  HaarSampler walker{99, 17};
  EXPECT_EQ(walker.next(4, 2).basis(), a);
  EXPECT_EQ(walker.counter, 18u);
}

TEST(Haar, Orthonormal) {
  for (const auto& s : haar_samples(5, 200, 5, 3)) EXPECT_LE(s.orthonormality_residual(), 1e-12);
}

TEST(Haar, ProjectorMeanIsIsotropic) {
  // E[B B'] = (i/n) I for Haar-distributed subspaces.
  const std::size_t n = 3, i = 2, count = 20000;
  Matrix mean = Matrix::Zero(3, 3);
  for (const auto& s : haar_samples(11, count, n, i)) mean += s.basis() * s.basis().transpose();
  mean /= static_cast<double>(count);
  EXPECT_LE((mean - (2.0 / 3.0) * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.01);
}

TEST(Haar, LineDirectionsUniformInPlane) {
  std::vector<double> u;
  for (const auto& s : haar_samples(3, 5000, 2, 1))
    u.push_back((std::atan2(s.basis()(1, 0), s.basis()(0, 0)) + oracle::kPi) / (2.0 * oracle::kPi));
  std::sort(u.begin(), u.end());
  EXPECT_LE(oracle::ks_uniform(u), 1.63 / std::sqrt(5000.0));
}

TEST(Haar, FirstCoordinateOfLinesInR3IsUniform) {
  // For a uniform unit vector in R^3, |e_1 . v| is U(0, 1) (Archimedes).
  std::vector<double> u;
  for (const auto& s : haar_samples(4, 5000, 3, 1)) u.push_back(std::abs(s.basis()(0, 0)));
  std::sort(u.begin(), u.end());
  EXPECT_LE(oracle::ks_uniform(u), 1.63 / std::sqrt(5000.0));
}

}  // namespace
}  // namespace lcq
