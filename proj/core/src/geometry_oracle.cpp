#include "lcq/geometry_oracle.hpp"

#include <cmath>
#include <numbers>

#include "lcq/errors.hpp"
#include "lcq/quermass.hpp"
#include "lcq/subspace.hpp"

namespace lcq {
namespace {

// e_m(a_1..a_n)
double elementary_symmetric(const Vector& a, std::size_t m) {
  std::vector<double> e(m + 1, 0.0);
  e[0] = 1.0;
  for (Eigen::Index k = 0; k < a.size(); ++k)
    for (std::size_t r = m; r >= 1; --r) e[r] += a[k] * e[r - 1];
  return e[m];
}

bool is_ball(const BodySpec& b) { return std::holds_alternative<Ball>(b.body); }

}  // namespace

std::size_t BodySpec::dim() const {
  if (const auto* b = std::get_if<Ball>(&body)) return b->dim;
  if (const auto* b = std::get_if<Box>(&body)) return static_cast<std::size_t>(b->halfwidths.size());
  return std::get<ScaledSum>(body).k->dim();
}

BodySpec ball(std::size_t dim, double radius) {
  if (dim == 0 || !(radius > 0.0)) throw InvalidArgument("ball: need dim >= 1 and radius > 0");
  return {Ball{dim, radius}};
}

BodySpec box(Vector halfwidths) {
  if (halfwidths.size() == 0 || !(halfwidths.array() > 0.0).all())
    throw InvalidArgument("box: halfwidths must be positive");
  return {Box{std::move(halfwidths)}};
}

BodySpec scaled_sum(BodySpec k, BodySpec l, double t) {
  if (k.dim() != l.dim()) throw DimensionMismatch("scaled_sum", k.dim(), l.dim());
  if (!(t >= 0.0)) throw InvalidArgument("scaled_sum: t must be >= 0");
  return {ScaledSum{std::make_shared<const BodySpec>(std::move(k)),
                    std::make_shared<const BodySpec>(std::move(l)), t}};
}

double body_quermass(const BodySpec& body, std::size_t j) {
  const std::size_t n = body.dim();
  if (j >= n) throw InvalidArgument("body_quermass: need 0 <= j <= n-1");
  if (const auto* b = std::get_if<Ball>(&body.body))
    return omega(n) * std::pow(b->radius, static_cast<double>(n - j));
  if (const auto* b = std::get_if<Box>(&body.body)) {
    const Vector edges = 2.0 * b->halfwidths;
    return elementary_symmetric(edges, n - j) * omega(j) / static_cast<double>(binomial(n, j));
  }
  const auto& s = std::get<ScaledSum>(body.body);
  const BodySpec& k = *s.k;
  const BodySpec& l = *s.l;
  if (is_ball(l) && !std::holds_alternative<ScaledSum>(k.body)) {
    // Steiner: W_j(K + rB) = sum_m C(n-j, m) W_{j+m}(K) r^m, with W_n = omega_n.
    const double r = s.t * std::get<Ball>(l.body).radius;
    double total = 0.0;
    for (std::size_t m = 0; m <= n - j; ++m) {
      const double w = j + m == n ? omega(n) : body_quermass(k, j + m);
      total += static_cast<double>(binomial(n - j, m)) * w * std::pow(r, static_cast<double>(m));
    }
    return total;
  }
  if (is_ball(k) && is_ball(l))
    return body_quermass(
        ball(n, std::get<Ball>(k.body).radius + s.t * std::get<Ball>(l.body).radius), j);
  if (const auto* a = std::get_if<Box>(&k.body)) {
    if (const auto* c = std::get_if<Box>(&l.body)) return body_quermass(box(a->halfwidths + s.t * c->halfwidths), j);
  }
  throw InvalidArgument("body_quermass: unsupported scaled sum");
}

double gaussian_moments(std::size_t n, std::size_t k) {
  const double base = std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(n));
  if (k == 0) return base;
  if (k == 2) return static_cast<double>(n) * base;
  throw InvalidArgument("gaussian_moments: k must be 0 or 2");
}

}  // namespace lcq
