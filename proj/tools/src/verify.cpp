#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "lcq/convex_function.hpp"
#include "lcq/geometry_oracle.hpp"
#include "lcq/legendre.hpp"
#include "lcq/projection.hpp"
#include "lcq/quermass.hpp"
#include "lcq/subspace.hpp"
#include "lcq_cli/cli.hpp"

namespace lcq::cli {
namespace {

constexpr double kPi = std::numbers::pi;

class Battery {
 public:
  void add(std::string test, double value, double reference, double residual, double budget) {
    rows_.push_back({std::move(test), value, reference, residual, budget,
                     std::isfinite(residual) && residual <= budget});
  }
  // |value - reference| against an absolute budget.
  void abs(std::string test, double value, double reference, double budget) {
    add(std::move(test), value, reference, std::abs(value - reference), budget);
  }
  // |value - reference| / |reference| against a relative budget.
  void rel(std::string test, double value, double reference, double budget) {
    add(std::move(test), value, reference, std::abs(value - reference) / std::abs(reference), budget);
  }
  std::vector<VerifyRow> take() { return std::move(rows_); }

 private:
  std::vector<VerifyRow> rows_;
};

double max_node_gap(const ConvexFunction& a, const ConvexFunction& b, const GridSpec& grid,
                    double radius = kInf) {
  double gap = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vector x = grid.point(k);
    if (x.lpNorm<Eigen::Infinity>() > radius) continue;
    const std::span<const double> xs(x.data(), grid.dim());
    const double va = value_or_inf(a, xs);
    const double vb = value_or_inf(b, xs);
    if (std::isinf(va) && std::isinf(vb)) continue;
    gap = std::max(gap, std::abs(va - vb));
  }
  return gap;
}

ConvexFunction random_quadratic(std::mt19937_64& rng, std::size_t n, double shift) {
  std::normal_distribution<double> normal;
  Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = 0.4 * normal(rng);
  Matrix q = a * a.transpose() + Matrix::Identity(a.rows(), a.cols());
  Vector b(static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = shift * normal(rng);
  return ConvexFunction::quadratic(q, b, 0.0);
}

void conjugate_checks(Battery& bat, std::mt19937_64& rng) {
  {
    const GridSpec g = GridSpec::cube(1, 3.0, 257);
    std::vector<double> v(g.size());
    std::uniform_real_distribution<double> unif(0.2, 2.0);
    const double a = unif(rng), b = unif(rng);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double x = g.point(k)[0];
      v[k] = 0.5 * a * x * x + b * std::abs(x - 0.3);
    }
    const auto u = ConvexFunction::from_grid(g, v, std::vector<std::uint8_t>(g.size(), 1));
    const GridSpec d = GridSpec::cube(1, 4.0, 301);
    bat.abs("conjugate_fast_vs_brute_1d", max_node_gap(conjugate(u, d).value,
                                                       conjugate_bruteforce(u, d).value, d),
            0.0, 1e-12);
  }
  {
    const GridSpec g = GridSpec::cube(3, 2.0, 17);
    const auto q = random_quadratic(rng, 3, 0.3);
    std::vector<double> v(g.size());
    std::vector<std::uint8_t> fin(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vector x = g.point(k);
      fin[k] = x.norm() <= 1.8 ? 1 : 0;
      v[k] = value_or_inf(q, std::span<const double>(x.data(), 3));
    }
    const auto u = ConvexFunction::from_grid(g, v, fin);
    const GridSpec d = GridSpec::cube(3, 2.5, 17);
    bat.abs("conjugate_fast_vs_brute_3d", max_node_gap(conjugate(u, d).value,
                                                       conjugate_bruteforce(u, d).value, d),
            0.0, 1e-12);
  }
  {
    const auto u = sample_to_grid(ConvexFunction::half_squared_norm(1), GridSpec::cube(1, 4.0, 257));
    const GridSpec d = GridSpec::cube(1, 3.0, 257);
    bat.abs("conjugate_half_square_257", max_node_gap(conjugate(u, d).value,
                                                      ConvexFunction::half_squared_norm(1), d),
            0.0, 1e-3);
  }
  {
    const auto u = sample_to_grid(ConvexFunction::indicator_box(Vector::Ones(2)), GridSpec::cube(2, 2.0, 65));
    const GridSpec d = GridSpec::cube(2, 3.0, 41);
    bat.abs("conjugate_cube_l1", max_node_gap(conjugate(u, d).value,
                                              ConvexFunction::weighted_l1(Vector::Ones(2)), d),
            0.0, 1e-12);
  }
  {
    const auto q = random_quadratic(rng, 2, 0.3);
    const GridSpec g = GridSpec::cube(2, 3.0, 129);
    const auto u = sample_to_grid(q, g);
    const GridSpec d = suggest_dual_grid(u, g, 129);
    const auto uss = conjugate(conjugate(u, d).value, g).value;
    // Lipschitz constant of u on the inner half of the box
    const double lip = (q.get_if<Quadratic>()->Q.norm() * 1.5 * std::sqrt(2.0)) +
                       q.get_if<Quadratic>()->b.norm();
    bat.add("biconjugation_2d", max_node_gap(uss, u, g, 1.5), 0.0, max_node_gap(uss, u, g, 1.5),
            2.0 * g.max_spacing() * lip);
  }
  {
    const GridSpec g = GridSpec::cube(1, 4.0, 257);
    const auto u = sample_to_grid(ConvexFunction::half_squared_norm(1), g);
    std::vector<Vector> pts;
    std::uniform_real_distribution<double> unif(-2.5, 2.5);
    for (int k = 0; k < 32; ++k) pts.push_back(Vector::Constant(1, unif(rng)));
    const auto r = gradient_bijection_check(u, pts, GridSpec::cube(1, 4.0, 257));
    bat.add("gradient_bijection_grid", r.inverse_residual, 0.0, r.inverse_residual, 5.0 * g.max_spacing());
    bat.add("fenchel_equality_grid", r.fenchel_residual, 0.0, r.fenchel_residual, 5.0 * g.max_spacing());
  }
  {
    const auto u = random_quadratic(rng, 2, 0.5);
    const auto v = random_quadratic(rng, 2, 0.5);
    const GridSpec d = GridSpec::cube(2, 2.0, 21);
    const auto lhs = conjugate(*inf_convolution_closed_form(u, v), d).value;
    const auto rhs = add_on_grid(conjugate(u, d).value, conjugate(v, d).value, d);
    bat.abs("conjugate_of_inf_convolution", max_node_gap(lhs, rhs, d), 0.0, 1e-9);
    const double alpha = 1.7;
    const auto lhs2 = conjugate(scalar_right_mul(u, alpha), d).value;
    const auto rhs2 = scale_values(conjugate(u, d).value, alpha);
    bat.abs("conjugate_of_right_multiple", max_node_gap(lhs2, rhs2, d), 0.0, 1e-9);
  }
}

void calculus_checks(Battery& bat) {
  const auto q = ConvexFunction::half_squared_norm(1);
  {
    const GridSpec g = GridSpec::cube(1, 4.0, 129);
    const auto r = inf_convolution(sample_to_grid(q, g), sample_to_grid(q, g), g);
    const auto exact = scale_values(q, 0.5);
    // half-spacing search lattice contains every midpoint x/2
    const auto brute = inf_convolution_bruteforce(q, q, g, GridSpec::cube(1, 4.0, 257));
    bat.abs("inf_convolution_dual_route", max_node_gap(r.value, exact, g, 2.0), 0.0, 1e-9);
    bat.abs("inf_convolution_bruteforce", max_node_gap(brute, exact, g, 2.0), 0.0, 1e-12);
  }
  {
    const auto gauss = ConvexFunction::half_squared_norm(2);
    const GridSpec g = GridSpec::cube(2, 6.0, 97);
    const auto grid = asplund_potential(gauss, gauss, 1.0, 0.5, g, Route::grid).value;
    const auto exact = scale_values(gauss, 1.0 / 1.5);
    bat.abs("asplund_sum_gaussian_grid_route", max_node_gap(grid, exact, g, 3.0), 0.0, 1e-9);
  }
  {
    // u_t nonincreasing in t, u_t -> u
    const auto u = ConvexFunction::quadratic(Vector::Constant(2, 1.0).asDiagonal().toDenseMatrix() * 1.5,
                                             Vector::Zero(2), 0.0);
    const auto v = ConvexFunction::indicator_ball(2, 1.0);
    std::size_t violations = 0;
    double previous_error = kInf;
    bool decaying = true;
    const Vector x = Vector::Constant(2, 0.7);
    const std::span<const double> xs(x.data(), 2);
    double last = value_or_inf(u, xs);
    const GridSpec g = GridSpec::cube(2, 3.0, 121);
    const AsplundPath path(u, v, g);
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
      const double ut = value_or_inf(path.at(t).value, xs);
      if (ut > last + 1e-9) ++violations;
      last = ut;
    }
    for (double t : {0.1, 0.05, 0.025}) {
      const double err = std::abs(value_or_inf(path.at(t).value, xs) - value_or_inf(u, xs));
      decaying = decaying && err < previous_error;
      previous_error = err;
    }
    bat.add("asplund_monotone_in_t", static_cast<double>(violations), 0.0, static_cast<double>(violations), 0.0);
    bat.add("asplund_limit_t_to_0", previous_error, 0.0, decaying ? 0.0 : 1.0, 0.0);
  }
  {
    const auto u = ConvexFunction::quadratic(Vector(Eigen::Vector2d(1.0, 4.0)).asDiagonal().toDenseMatrix(),
                                             Vector::Zero(2), 0.0);
    const auto v = ConvexFunction::half_squared_norm(2);
    const double r = asplund_derivative_residual(u, v, 0.5, Eigen::Vector2d(0.8, -0.4), 1e-3);
    bat.abs("asplund_derivative_lemma", r, 0.0, 1e-4);
    const Subspace x_axis = axis_subspaces(2, 1)[0];
    const double r2 = projection_derivative_residual(u, v, x_axis, 0.5, Vector::Constant(1, 1.0), 1e-3);
    bat.abs("projection_derivative_lemma", r2, 0.0, 1e-4);
  }
}

void projection_checks(Battery& bat, std::uint64_t seed) {
  {
    const auto u = ConvexFunction::quadratic(Vector(Eigen::Vector2d(1.0, 4.0)).asDiagonal().toDenseMatrix(),
                                             Vector::Zero(2), 0.0);
    const GridSpec amb = GridSpec::cube(2, 4.0, 65);
    const Subspace y_axis = axis_subspaces(2, 1)[1];
    const auto p = project_potential(u, y_axis, subspace_grid(amb, y_axis.basis()),
                                     subspace_grid(amb, y_axis.complement()), {.analytic = false});
    const auto exact = ConvexFunction::quadratic(Matrix::Constant(1, 1, 4.0), Vector::Zero(1), 0.0);
    bat.abs("projection_anisotropic_fiber", max_node_gap(p.value, exact, subspace_grid(amb, y_axis.basis()), 2.0),
            0.0, 1e-6);
  }
  {
    const auto f = LogConcaveFunction::gaussian(2);
    const GridSpec amb = GridSpec::cube(2, 6.0, 97);
    const Subspace xi = HaarSampler{seed, 0}.sample(3, 2, 1);
    const GridSpec target = subspace_grid(amb, xi.basis());
    const auto r = project_properties_check(f, f, xi, 1.0, 1.0, amb, target,
                                            subspace_grid(amb, xi.complement()));
    bat.add("projection_commutes_with_sum", r.structure_residual, 0.0, r.structure_residual,
            3.0 * r.target_spacing);
    const LogConcaveFunction g(add_constant(f.potential(), -1.0));
    const auto r2 = project_properties_check(f, g, xi, 1.0, 1.0, amb, target,
                                             subspace_grid(amb, xi.complement()));
    bat.add("projection_order_preserving", static_cast<double>(r2.order_violations), 0.0,
            static_cast<double>(r2.order_violations), 0.0);
  }
  {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k)
      worst = std::max(worst, HaarSampler{seed, 0}.sample(k, 3, 2).orthonormality_residual());
    bat.abs("haar_orthonormality", worst, 0.0, 1e-12);
  }
  {
    const std::size_t count = 10000;
    std::vector<double> angles(count);
    for (std::size_t k = 0; k < count; ++k) {
      const Matrix b = HaarSampler{seed, 0}.sample(k, 2, 1).basis();
      angles[k] = (std::atan2(b(1, 0), b(0, 0)) + kPi) / (2.0 * kPi);
    }
    std::sort(angles.begin(), angles.end());
    double ks = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      const double lo = static_cast<double>(k) / count;
      const double hi = static_cast<double>(k + 1) / count;
      ks = std::max({ks, std::abs(angles[k] - lo), std::abs(hi - angles[k])});
    }
    bat.add("haar_uniform_angle_ks", ks, 0.0, ks, 1.63 / std::sqrt(static_cast<double>(count)));
  }
}

void quermass_checks(Battery& bat, std::uint64_t seed, std::mt19937_64& rng) {
  bat.abs("omega_3", omega(3), 4.0 * kPi / 3.0, 1e-12);
  {
    EngineConfig cfg;
    cfg.mass_rule = MassRule::quadrature;
    cfg.ambient = GridSpec::cube(2, 6.0, 257);
    const auto r = total_mass(LogConcaveFunction::gaussian(2), *cfg.ambient, cfg);
    bat.abs("total_mass_gaussian_2d", r.value, 2.0 * kPi, 1e-4);
  }
  {
    EngineConfig cfg;
    cfg.mass_rule = MassRule::quadrature;
    cfg.ambient = GridSpec::cube(3, 1.25, 81);
    cfg.subspace_count = 401;
    const auto ball = LogConcaveFunction::characteristic_ball(3, 1.0);
    for (std::size_t j = 1; j < 3; ++j) {
      const auto r = quermassintegral(ball, j, cfg);
      bat.rel("ball_quermass_n3_j" + std::to_string(j), r.value, body_quermass(lcq::ball(3, 1.0), j), 0.01);
    }
  }
  {
    EngineConfig cfg;
    cfg.mode = SubspaceMode::mc;
    cfg.samples = 64;
    cfg.seed = seed;
    const auto r = quermassintegral(LogConcaveFunction::gaussian(3), 1, cfg);
    bat.rel("gaussian_quermass_n3_j1", r.value, omega(3) / omega(2) * 2.0 * kPi, 1e-9);
    bat.abs("gaussian_quermass_stderr", r.std_error, 0.0, 1e-9);
  }
  const auto gauss2 = LogConcaveFunction::gaussian(2);
  {
    EngineConfig cfg;
    cfg.count = 65;
    const auto fd = mixed_quermass_fd(gauss2, gauss2, 0, cfg);
    bat.rel("mixed_fd_gaussian_n2_j0", fd.value, kPi, 0.02);
    const auto rep = mixed_quermass_representation(gauss2, gauss2, 0, cfg);
    bat.rel("mixed_representation_gaussian_n2_j0", rep.value, kPi, 0.01);
  }
  {
    EngineConfig cfg;
    cfg.mode = SubspaceMode::mc;
    cfg.samples = 32;
    cfg.seed = seed;
    cfg.count = 65;
    const auto r = blaschke_petkantschin_check(gauss2, 1, cfg);
    bat.add("blaschke_petkantschin_n2_i1", r.rhs, r.lhs, r.relative_gap, r.budget);
  }
  {
    EngineConfig cfg;
    cfg.route = Route::analytic;
    double worst = kInf;
    for (int pair = 0; pair < 10; ++pair) {
      const LogConcaveFunction f(random_quadratic(rng, 2, 0.5));
      const LogConcaveFunction g(random_quadratic(rng, 2, 0.5));
      for (double lambda : {0.25, 0.5, 0.75})
        worst = std::min(worst, prekopa_leindler_check(f, g, lambda, cfg).relative_gap);
    }
    bat.add("prekopa_leindler_min_gap", worst, 0.0, std::max(0.0, -worst), 1e-6);
  }
  {
    EngineConfig cfg;
    cfg.route = Route::analytic;
    const LogConcaveFunction g(add_constant(ConvexFunction::half_squared_norm(2), 1.0));
    const auto r = existence_bound_check(gauss2, g, 0, cfg);
    bat.add("existence_lower_bound", r.mixed.value, r.bound, r.satisfied ? 0.0 : r.bound - r.mixed.value, 0.0);
  }
  {
    EngineConfig cfg;
    const auto r = homogeneity_check(gauss2, 1, 2.0, cfg);
    bat.add("homogeneity_lambda_2", r.lhs, r.rhs, r.relative_gap, 0.01);
  }
}

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<VerifyRow> verify_battery(std::uint64_t seed) {
  Battery bat;
  std::mt19937_64 rng(seed);
  conjugate_checks(bat, rng);
  calculus_checks(bat);
  projection_checks(bat, seed);
  quermass_checks(bat, seed, rng);
  return bat.take();
}

std::string verify_csv(const std::vector<VerifyRow>& rows) {
  std::ostringstream os;
  os << "test,value,reference,residual,budget,pass\n";
  for (const auto& r : rows)
    os << r.test << ',' << format(r.value) << ',' << format(r.reference) << ',' << format(r.residual)
       << ',' << format(r.budget) << ',' << (r.pass ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace lcq::cli
