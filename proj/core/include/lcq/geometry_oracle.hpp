#pragma once

#include <memory>
#include <variant>

#include "lcq/grid.hpp"

namespace lcq {

/// Classical convex bodies with closed-form Quermassintegrals.
struct Ball {
  std::size_t dim = 1;
  double radius = 1.0;
};

struct Box {
  Vector halfwidths;
};

struct BodySpec;

/// K + t L.
struct ScaledSum {
  std::shared_ptr<const BodySpec> k;
  std::shared_ptr<const BodySpec> l;
  double t = 1.0;
};

struct BodySpec {
  std::variant<Ball, Box, ScaledSum> body;

  std::size_t dim() const;
};

BodySpec ball(std::size_t dim, double radius);
BodySpec box(Vector halfwidths);
BodySpec scaled_sum(BodySpec k, BodySpec l, double t);

/// W_j(K), normalised so that W_j(B_R) = omega_n R^{n-j} and
/// vol(K + eps B) = sum_j C(n, j) W_j(K) eps^j. Boxes use the elementary
/// symmetric functions of their edge lengths. Scaled sums support
/// K + t B (ball L) and same-kind sums (ball + ball, box + box).
double body_quermass(const BodySpec& body, std::size_t j);

/// int |x|^k e^{-|x|^2/2} dx over R^n for k in {0, 2}.
double gaussian_moments(std::size_t n, std::size_t k);

}  // namespace lcq
