#include "lcq/projection.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>

#include <Eigen/Cholesky>

#include "lcq/errors.hpp"
#include "lcq/legendre.hpp"
#include "lcq/parallel.hpp"

namespace lcq {
namespace {

constexpr std::size_t kMaxDim = 16;

std::optional<ConvexFunction> project_quadratic(const Quadratic& q, const Subspace& xi) {
  const Matrix& B = xi.basis();
  const Matrix& C = xi.complement();
  Matrix Qx = B.transpose() * q.Q * B;
  Vector bx = B.transpose() * q.b;
  double c = q.c;
  if (C.cols() > 0) {
    const Matrix QC = q.Q * C;
    const Eigen::LLT<Matrix> llt(C.transpose() * QC);
    const Matrix BtQC = B.transpose() * QC;
    const Vector Ctb = C.transpose() * q.b;
    Qx -= BtQC * llt.solve(BtQC.transpose());
    bx -= BtQC * llt.solve(Ctb);
    c -= 0.5 * Ctb.dot(llt.solve(Ctb));
  }
  return ConvexFunction::quadratic(0.5 * (Qx + Qx.transpose()), bx, c);
}

// Axis picked by each basis column of a coordinate subspace.
std::vector<Eigen::Index> picked_axes(const Subspace& xi) {
  std::vector<Eigen::Index> axes;
  const Matrix& B = xi.basis();
  for (Eigen::Index c = 0; c < B.cols(); ++c) {
    Eigen::Index r = 0;
    B.col(c).cwiseAbs().maxCoeff(&r);
    axes.push_back(r);
  }
  return axes;
}

std::optional<ConvexFunction> project_closed_form(const ConvexFunction& u, const Subspace& xi) {
  const std::size_t i = xi.sub_dim();
  if (const auto* q = u.get_if<Quadratic>()) return project_quadratic(*q, xi);
  if (const auto* b = u.get_if<IndicatorBall>())
    return ConvexFunction::indicator_ball(i, b->radius, b->offset);
  if (const auto* nm = u.get_if<NormMultiple>())
    return ConvexFunction::norm_multiple(i, nm->a, nm->offset);
  if (!xi.is_axis_aligned()) return std::nullopt;
  const auto axes = picked_axes(xi);
  if (const auto* box = u.get_if<IndicatorBox>()) {
    Vector h(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < i; ++k) h[static_cast<Eigen::Index>(k)] = box->halfwidths[axes[k]];
    return ConvexFunction::indicator_box(h, box->offset);
  }
  if (const auto* wl = u.get_if<WeightedL1>()) {
    Vector w(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < i; ++k) w[static_cast<Eigen::Index>(k)] = wl->weights[axes[k]];
    return ConvexFunction::weighted_l1(w, wl->offset);
  }
  return std::nullopt;
}

// Golden-section minimisation of phi on [a, b].
template <class Phi>
std::pair<double, double> golden_min(Phi&& phi, double a, double b, int evaluations) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = phi(c);
  double fd = phi(d);
  for (int k = 0; k < evaluations; ++k) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = phi(d);
    }
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

Flagged<ConvexFunction> restrict_to_subspace(const ConvexFunction& u, const Subspace& xi,
                                             const GridSpec& target) {
  const std::size_t n = u.dim();
  const Matrix& B = xi.basis();
  std::vector<double> values(target.size());
  std::vector<std::uint8_t> finite(target.size());
  parallel_for(target.size(), [&](std::size_t node) {
    const Vector p = B * target.point(node);
    const double v = value_or_inf(u, std::span<const double>(p.data(), n));
    values[node] = v;
    finite[node] = std::isfinite(v) ? 1 : 0;
  });
  return {ConvexFunction::from_grid(target, std::move(values), std::move(finite), GridCheck::none),
          {}};
}

}  // namespace

GridSpec subspace_grid(const GridSpec& ambient, const Matrix& frame, std::size_t count) {
  const std::size_t n = ambient.dim();
  if (static_cast<std::size_t>(frame.rows()) != n)
    throw DimensionMismatch("subspace_grid: frame rows", n, static_cast<std::size_t>(frame.rows()));
  Vector centre(static_cast<Eigen::Index>(n));
  double half = 0.0;
  std::size_t nodes = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Axis& a = ambient.axis(k);
    centre[static_cast<Eigen::Index>(k)] = 0.5 * (a.lo + a.hi);
    half = std::max(half, 0.5 * (a.hi - a.lo));
    nodes = std::max(nodes, a.count);
  }
  if (count == 0) count = nodes;
  const Vector c = frame.transpose() * centre;
  std::vector<Axis> axes;
  for (Eigen::Index k = 0; k < frame.cols(); ++k) axes.push_back({c[k] - half, c[k] + half, count});
  return GridSpec(std::move(axes));
}

Flagged<ConvexFunction> project_potential(const ConvexFunction& u, const Subspace& xi,
                                          const GridSpec& target,
                                          const std::optional<GridSpec>& fiber,
                                          ProjectionOptions options) {
  const std::size_t n = u.dim();
  const std::size_t i = xi.sub_dim();
  if (xi.ambient_dim() != n) throw DimensionMismatch("project: subspace ambient", n, xi.ambient_dim());
  if (target.dim() != i) throw DimensionMismatch("project: target grid", i, target.dim());
  if (n > kMaxDim) throw InvalidArgument("project: dimension too large");

  if (i == n) {
    if (xi.is_identity()) return {u, {}};
    if (options.analytic && !u.is_grid())
      if (auto closed = project_closed_form(u, xi)) return {std::move(*closed), {}};
    return restrict_to_subspace(u, xi, target);
  }
  if (!fiber) throw InvalidArgument("project: a fiber grid is required when i < n");
  if (fiber->dim() != n - i) throw DimensionMismatch("project: fiber grid", n - i, fiber->dim());
  if (options.analytic && !u.is_grid())
    if (auto closed = project_closed_form(u, xi)) return {std::move(*closed), {}};

  const Matrix& B = xi.basis();
  const Matrix& C = xi.complement();
  const std::size_t m = n - i;
  std::vector<double> values(target.size());
  std::vector<std::uint8_t> finite(target.size());
  std::atomic<bool> edge{false};

  parallel_for(target.size(), [&](std::size_t node) {
    std::array<double, kMaxDim> pbuf{};
    std::array<double, kMaxDim> zbuf{};
    std::array<double, kMaxDim> best_z{};
    const std::span<double> p(pbuf.data(), n);
    const std::span<double> z(zbuf.data(), m);
    const Vector x = target.point(node);
    const Vector base = B * x;

    auto value_at = [&](std::span<const double> zz) {
      for (std::size_t r = 0; r < n; ++r) {
        double s = base[static_cast<Eigen::Index>(r)];
        for (std::size_t c = 0; c < m; ++c)
          s += C(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * zz[c];
        p[r] = s;
      }
      return value_or_inf(u, p);
    };

    double best = kInf;
    std::size_t best_node = 0;
    for (std::size_t k = 0; k < fiber->size(); ++k) {
      fiber->point(k, z);
      const double v = value_at(z);
      if (v < best) {
        best = v;
        best_node = k;
      }
    }
    if (std::isfinite(best)) {
      fiber->point(best_node, std::span<double>(best_z.data(), m));
      if (fiber->on_boundary(best_node) && !target.on_boundary(node))
        edge.store(true, std::memory_order_relaxed);
      for (int sweep = 0; sweep < options.refine_sweeps; ++sweep) {
        for (std::size_t a = 0; a < m; ++a) {
          const double h = fiber->spacing(a);
          std::array<double, kMaxDim> trial = best_z;
          auto phi = [&](double s) {
            trial[a] = s;
            return value_at(std::span<const double>(trial.data(), m));
          };
          const auto [s, v] = golden_min(phi, best_z[a] - h, best_z[a] + h, 24);
          if (v < best) {
            best = v;
            best_z[a] = s;
          }
        }
      }
    }
    values[node] = best;
    finite[node] = std::isfinite(best) ? 1 : 0;
  });

  Flagged<ConvexFunction> out{
      ConvexFunction::from_grid(target, std::move(values), std::move(finite), GridCheck::none), {}};
  if (edge.load())
    out.warnings.push_back(
        "project: fiber minimum on the fiber box boundary at interior target nodes; widen the "
        "fiber grid");
  return out;
}

Flagged<LogConcaveFunction> project(const LogConcaveFunction& f, const Subspace& xi,
                                    const std::optional<GridSpec>& fiber, const GridSpec& target,
                                    ProjectionOptions options) {
  auto r = project_potential(f.potential(), xi, target, fiber, options);
  return {LogConcaveFunction(std::move(r.value)), std::move(r.warnings)};
}

ProjectionReport project_properties_check(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                          const Subspace& xi, double alpha, double beta,
                                          const GridSpec& ambient, const GridSpec& target,
                                          const GridSpec& fiber) {
  const ConvexFunction& u = f.potential();
  const ConvexFunction& v = g.potential();
  const ProjectionOptions lattice{.analytic = false};
  ProjectionReport report;
  report.target_spacing = target.max_spacing();

  auto sum = asplund_potential(u, v, alpha, beta, ambient, Route::grid);
  merge_warnings(report.warnings, sum.warnings);
  auto lhs = project_potential(sum.value, xi, target, fiber, lattice);
  merge_warnings(report.warnings, lhs.warnings);

  const ConvexFunction ug = u.is_grid() ? u : sample_to_grid(u, ambient);
  const ConvexFunction vg = v.is_grid() ? v : sample_to_grid(v, ambient);
  auto uxi = project_potential(ug, xi, target, fiber, lattice);
  auto vxi = project_potential(vg, xi, target, fiber, lattice);
  merge_warnings(report.warnings, uxi.warnings);
  merge_warnings(report.warnings, vxi.warnings);
  auto rhs = asplund_potential(uxi.value, vxi.value, alpha, beta, target, Route::grid);
  merge_warnings(report.warnings, rhs.warnings);

  const std::size_t i = target.dim();
  auto density = [](double w) { return std::isfinite(w) ? std::exp(-w) : 0.0; };
  for (std::size_t node = 0; node < target.size(); ++node) {
    const Vector x = target.point(node);
    const std::span<const double> xs(x.data(), i);
    const double a = density(value_or_inf(lhs.value, xs));
    const double b = density(value_or_inf(rhs.value, xs));
    report.structure_residual = std::max(report.structure_residual, std::abs(a - b));
    if (density(value_or_inf(uxi.value, xs)) > density(value_or_inf(vxi.value, xs)) + 1e-12)
      ++report.order_violations;
  }

  report.ordered_input = true;
  for (std::size_t node = 0; node < ambient.size(); ++node) {
    const Vector x = ambient.point(node);
    const std::span<const double> xs(x.data(), ambient.dim());
    if (density(value_or_inf(u, xs)) > density(value_or_inf(v, xs)) + 1e-12) {
      report.ordered_input = false;
      break;
    }
  }
  return report;
}

double projection_derivative_residual(const ConvexFunction& u, const ConvexFunction& v,
                                      const Subspace& xi, double t, const Vector& x, double dt) {
  if (!(t > 0.0) || !(dt > 0.0)) throw InvalidArgument("projection_derivative_residual: t, dt > 0");
  auto member = [&](double s) {
    auto w = inf_convolution_closed_form(u, scalar_right_mul(v, s));
    std::optional<ConvexFunction> p;
    if (w && w->get_if<Quadratic>()) p = project_closed_form(*w, xi);
    if (!p) throw InvalidArgument("projection_derivative_residual: needs quadratic presets");
    return *p;
  };
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  double derivative;
  if (t > dt) {
    derivative = (value_or_inf(member(t + dt), xs) - value_or_inf(member(t - dt), xs)) / (2.0 * dt);
  } else {
    derivative = (value_or_inf(member(t + dt), xs) - value_or_inf(member(t), xs)) / dt;
  }
  const EvalResult e = evaluate(member(t), x);
  if (!e.gradient) throw GradientUnavailable("projection_derivative_residual: no gradient");
  const Vector y = xi.basis() * *e.gradient;
  const auto vstar = conjugate_closed_form(v);
  return std::abs(derivative + value_or_inf(*vstar, std::span<const double>(y.data(), y.size())));
}

}  // namespace lcq
