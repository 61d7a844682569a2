#include "lcq/legendre.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <memory>

#include <Eigen/Cholesky>

#include "lcq/errors.hpp"
#include "lcq/parallel.hpp"

namespace lcq {
namespace {

constexpr double kNegInf = -kInf;

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b) throw DimensionMismatch(where, a, b);
}

Matrix spd_inverse(const Matrix& Q) {
  Eigen::LLT<Matrix> llt(Q);
  Matrix inv = llt.solve(Matrix::Identity(Q.rows(), Q.cols()));
  return 0.5 * (inv + inv.transpose());
}

ConvexFunction conjugate_quadratic(const Quadratic& q) {
  const Matrix Qi = spd_inverse(q.Q);
  const Vector Qib = Qi * q.b;
  return ConvexFunction::quadratic(Qi, -Qib, 0.5 * q.b.dot(Qib) - q.c);
}

// One 1-D partial conjugate along a lattice line:
//   out[j] = max_i x_i y_j + w_i
// via the lower convex hull of (x_i, -w_i). Returns the argmax index per
// output node in `arg` (npos when the whole line is -inf).
struct LineTransform {
  std::vector<std::size_t> hull;

  // Second differences at v-1, v, v+1 agree within a factor 2. Kinks (and
  // anything near masked nodes or the line ends) are left unrefined, where
  // the plain maximum is the exact conjugate of the linear interpolant.
  static bool smooth_at(std::span<const double> w, std::size_t v) {
    if (v < 2 || v + 2 >= w.size()) return false;
    for (std::size_t k = v - 2; k <= v + 2; ++k)
      if (w[k] == kNegInf) return false;
    auto d2 = [&](std::size_t k) { return 2.0 * w[k] - w[k - 1] - w[k + 1]; };
    const double c = d2(v);
    if (!(c > 0.0)) return false;
    for (double side : {d2(v - 1), d2(v + 1)})
      if (!(side >= 0.5 * c && side <= 2.0 * c)) return false;
    return true;
  }

  void run(std::span<const double> x, std::span<const double> w, std::span<const double> y,
           std::span<double> out, std::span<std::size_t> arg, bool refine) {
    hull.clear();
    const std::size_t np = x.size();
    for (std::size_t i = 0; i < np; ++i) {
      if (w[i] == kNegInf) continue;
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2];
        const std::size_t b = hull.back();
        const double cross = (x[b] - x[a]) * (-w[i] + w[a]) - (-w[b] + w[a]) * (x[i] - x[a]);
        if (cross > 0.0) break;
        hull.pop_back();
      }
      hull.push_back(i);
    }
    if (hull.empty()) {
      std::fill(out.begin(), out.end(), kNegInf);
      std::fill(arg.begin(), arg.end(), static_cast<std::size_t>(-1));
      return;
    }
    std::size_t l = 0;
    for (std::size_t j = 0; j < y.size(); ++j) {
      while (l + 1 < hull.size()) {
        const std::size_t a = hull[l];
        const std::size_t b = hull[l + 1];
        const double slope = (-w[b] + w[a]) / (x[b] - x[a]);
        if (!(slope < y[j])) break;
        ++l;
      }
      const std::size_t v = hull[l];
      double value = x[v] * y[j] + w[v];
      if (refine && smooth_at(w, v)) {
        // g = -w - x y, parabola through v-1, v, v+1
        const double gm = -(x[v - 1] * y[j] + w[v - 1]);
        const double g0 = -value;
        const double gp = -(x[v + 1] * y[j] + w[v + 1]);
        const double c2 = gp - 2.0 * g0 + gm;
        const double d = gp - gm;
        if (c2 > 0.0 && std::abs(d) <= 2.0 * c2) value = -(g0 - d * d / (8.0 * c2));
      }
      out[j] = value;
      arg[j] = v;
    }
  }
};

std::vector<double> axis_nodes(const Axis& a) {
  std::vector<double> v(a.count);
  for (std::size_t k = 0; k < a.count; ++k) v[k] = a.node(k);
  return v;
}

std::string edge_warning(std::size_t axis) {
  return "conjugate: maximiser on the primal box face along axis " + std::to_string(axis) +
         " for interior dual nodes (dual grid wider than the slope range, or primal box too "
         "small)";
}

Flagged<ConvexFunction> fast_conjugate(const GridSamples& s, const GridSpec& dual, bool refine) {
  const GridSpec& primal = s.grid;
  const std::size_t n = primal.dim();
  std::vector<std::size_t> dims(n);
  for (std::size_t k = 0; k < n; ++k) dims[k] = primal.count(k);

  std::vector<double> work(s.values.size());
  for (std::size_t k = 0; k < work.size(); ++k) work[k] = s.finite[k] ? -s.values[k] : kNegInf;

  std::vector<std::string> warnings;
  for (std::size_t axis = 0; axis < n; ++axis) {
    const std::size_t np = primal.count(axis);
    const std::size_t nd = dual.count(axis);
    std::size_t outer = 1;
    for (std::size_t k = 0; k < axis; ++k) outer *= dims[k];
    std::size_t inner = 1;
    for (std::size_t k = axis + 1; k < n; ++k) inner *= dims[k];
    const std::vector<double> xs = axis_nodes(primal.axis(axis));
    const std::vector<double> ys = axis_nodes(dual.axis(axis));

    std::vector<double> next(outer * nd * inner);
    std::atomic<bool> edge_hit{false};
    const std::size_t lines = outer * inner;
    // Lines are grouped in fixed-size chunks to amortise scratch buffers.
    const std::size_t chunk = 64;
    const std::size_t chunks = (lines + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t c) {
      LineTransform lt;
      std::vector<double> in(np), out(nd);
      std::vector<std::size_t> arg(nd);
      bool local_edge = false;
      const std::size_t end = std::min(lines, (c + 1) * chunk);
      for (std::size_t line = c * chunk; line < end; ++line) {
        const std::size_t o = line / inner;
        const std::size_t in_idx = line % inner;
        const std::size_t src = o * np * inner + in_idx;
        for (std::size_t i = 0; i < np; ++i) in[i] = work[src + i * inner];
        lt.run(xs, in, ys, out, arg, refine);
        const std::size_t dst = o * nd * inner + in_idx;
        for (std::size_t j = 0; j < nd; ++j) {
          next[dst + j * inner] = out[j];
          if (j > 0 && j + 1 < nd && (arg[j] == 0 || arg[j] == np - 1)) local_edge = true;
        }
      }
      if (local_edge) edge_hit.store(true, std::memory_order_relaxed);
    });
    if (edge_hit.load()) warnings.push_back(edge_warning(axis));
    work = std::move(next);
    dims[axis] = nd;
  }

  std::vector<std::uint8_t> finite(work.size());
  for (std::size_t k = 0; k < work.size(); ++k) {
    finite[k] = std::isfinite(work[k]) ? 1 : 0;
    if (!finite[k]) work[k] = kInf;
  }
  return {ConvexFunction::from_grid(dual, std::move(work), std::move(finite), GridCheck::none),
          std::move(warnings)};
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_point_indicator(const ConvexFunction& u) {
  const auto* b = u.get_if<IndicatorBall>();
  return b != nullptr && b->radius == 0.0;
}

double point_offset(const ConvexFunction& u) { return u.get_if<IndicatorBall>()->offset; }

bool has_mask(const ConvexFunction& u) {
  const auto& f = u.samples().finite;
  return std::any_of(f.begin(), f.end(), [](auto b) { return b == 0; });
}

GridSpec with_counts(const GridSpec& box, const GridSpec& counts) {
  std::vector<Axis> axes = box.axes();
  for (std::size_t k = 0; k < axes.size(); ++k) axes[k].count = counts.count(k);
  return GridSpec(std::move(axes));
}

// Conjugate of the 0-indicator of the finite nodes of a grid form.
ConvexFunction domain_support(const ConvexFunction& ug, const GridSpec& unit) {
  const GridSamples& s = ug.samples();
  std::vector<double> zeros(s.values.size(), 0.0);
  for (std::size_t k = 0; k < zeros.size(); ++k)
    if (!s.finite[k]) zeros[k] = kInf;
  const ConvexFunction ind = ConvexFunction::from_grid(s.grid, zeros, s.finite, GridCheck::none);
  return fast_conjugate(ind.samples(), unit, false).value;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<ConvexFunction> conjugate_closed_form(const ConvexFunction& u) {
  return std::visit(
      Overloaded{
          [](const Quadratic& q) -> std::optional<ConvexFunction> { return conjugate_quadratic(q); },
          [](const IndicatorBall& b) -> std::optional<ConvexFunction> {
            return ConvexFunction::norm_multiple(b.dim, b.radius, -b.offset);
          },
          [](const IndicatorBox& b) -> std::optional<ConvexFunction> {
            return ConvexFunction::weighted_l1(b.halfwidths, -b.offset);
          },
          [](const NormMultiple& nm) -> std::optional<ConvexFunction> {
            return ConvexFunction::indicator_ball(nm.dim, nm.a, -nm.offset);
          },
          [](const WeightedL1& w) -> std::optional<ConvexFunction> {
            return ConvexFunction::indicator_box(w.weights, -w.offset);
          },
          [](const std::shared_ptr<const GridSamples>&) -> std::optional<ConvexFunction> {
            return std::nullopt;
          }},
      u.form());
}

Flagged<ConvexFunction> conjugate(const ConvexFunction& u, const GridSpec& dual_grid,
                                  ConjugateOptions options) {
  require_same_dim(u.dim(), dual_grid.dim(), "conjugate: dual grid");
  if (auto closed = conjugate_closed_form(u)) return {std::move(*closed), {}};
  return fast_conjugate(u.samples(), dual_grid, options.refine);
}

Flagged<ConvexFunction> conjugate_bruteforce(const ConvexFunction& u, const GridSpec& dual_grid) {
  require_same_dim(u.dim(), dual_grid.dim(), "conjugate_bruteforce: dual grid");
  if (!u.is_grid()) throw InvalidArgument("conjugate_bruteforce: grid form required");
  const GridSamples& s = u.samples();
  const std::size_t n = u.dim();
  std::vector<double> coords;
  std::vector<double> neg_values;
  std::vector<std::size_t> flat;
  for (std::size_t k = 0; k < s.grid.size(); ++k) {
    if (!s.finite[k]) continue;
    const Vector p = s.grid.point(k);
    coords.insert(coords.end(), p.data(), p.data() + n);
    neg_values.push_back(-s.values[k]);
    flat.push_back(k);
  }
  if (flat.empty()) throw ImproperFunction("conjugate_bruteforce: improper input");

  std::vector<double> values(dual_grid.size());
  std::vector<std::size_t> arg(dual_grid.size());
  parallel_for(dual_grid.size(), [&](std::size_t node) {
    const Vector y = dual_grid.point(node);
    double best = kNegInf;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      double v = neg_values[i];
      for (std::size_t k = 0; k < n; ++k) v = coords[i * n + k] * y[static_cast<Eigen::Index>(k)] + v;
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    values[node] = best;
    arg[node] = flat[best_i];
  });

  std::vector<std::string> warnings;
  std::vector<std::size_t> pi(n), di(n);
  for (std::size_t axis = 0; axis < n; ++axis) {
    for (std::size_t node = 0; node < dual_grid.size(); ++node) {
      dual_grid.unflatten(node, di);
      s.grid.unflatten(arg[node], pi);
      if (di[axis] > 0 && di[axis] + 1 < dual_grid.count(axis) &&
          (pi[axis] == 0 || pi[axis] + 1 == s.grid.count(axis))) {
        warnings.push_back(edge_warning(axis));
        break;
      }
    }
  }
  std::vector<std::uint8_t> finite(values.size(), 1);
  return {ConvexFunction::from_grid(dual_grid, std::move(values), std::move(finite),
                                    GridCheck::none),
          std::move(warnings)};
}

GridSpec suggest_dual_grid(const ConvexFunction& u, const GridSpec& primal, std::size_t count) {
  require_same_dim(u.dim(), primal.dim(), "suggest_dual_grid");
  const ConvexFunction ug = u.is_grid() ? u : sample_to_grid(u, primal);
  const GridSamples& s = ug.samples();
  const GridSpec& g = s.grid;
  std::vector<Axis> axes;
  for (std::size_t axis = 0; axis < g.dim(); ++axis) {
    const std::size_t stride = g.stride(axis);
    const double h = g.spacing(axis);
    double lo = kInf, hi = -kInf;
    for (std::size_t node = 0; node < g.size(); ++node) {
      if ((node / stride) % g.count(axis) + 1 == g.count(axis)) continue;
      const std::size_t next = node + stride;
      if (!s.finite[node] || !s.finite[next]) continue;
      const double slope = (s.values[next] - s.values[node]) / h;
      lo = std::min(lo, slope);
      hi = std::max(hi, slope);
    }
    if (!(lo <= hi)) lo = hi = 0.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double c = 0.5 * (lo + hi);
      lo = c - 1.0;
      hi = c + 1.0;
    }
    const double pad = (hi - lo) / static_cast<double>(std::max<std::size_t>(count, 2) - 1);
    axes.push_back({lo - pad, hi + pad, count});
  }
  return GridSpec(std::move(axes));
}

GridSpec grid_union(const GridSpec& a, const GridSpec& b, std::size_t count) {
  require_same_dim(a.dim(), b.dim(), "grid_union");
  std::vector<Axis> axes;
  for (std::size_t k = 0; k < a.dim(); ++k)
    axes.push_back({std::min(a.axis(k).lo, b.axis(k).lo), std::max(a.axis(k).hi, b.axis(k).hi),
                    count});
  return GridSpec(std::move(axes));
}

ConvexFunction scalar_right_mul(const ConvexFunction& u, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InvalidArgument("scalar_right_mul: alpha must be >= 0");
  if (alpha == 0.0) return ConvexFunction::point_indicator(u.dim());
  return std::visit(
      Overloaded{
          [&](const Quadratic& q) { return ConvexFunction::quadratic(q.Q / alpha, q.b, alpha * q.c); },
          [&](const IndicatorBall& b) {
            return ConvexFunction::indicator_ball(b.dim, alpha * b.radius, alpha * b.offset);
          },
          [&](const IndicatorBox& b) {
            return ConvexFunction::indicator_box(alpha * b.halfwidths, alpha * b.offset);
          },
          [&](const NormMultiple& nm) {
            return ConvexFunction::norm_multiple(nm.dim, nm.a, alpha * nm.offset);
          },
          [&](const WeightedL1& w) { return ConvexFunction::weighted_l1(w.weights, alpha * w.offset); },
          [&](const std::shared_ptr<const GridSamples>& gs) {
            std::vector<double> v = gs->values;
            for (auto& x : v) x *= alpha;
            return ConvexFunction::from_grid(gs->grid.scaled(alpha), std::move(v), gs->finite,
                                             GridCheck::none);
          }},
      u.form());
}

ConvexFunction add_on_grid(const ConvexFunction& u, const ConvexFunction& v, const GridSpec& grid,
                           double v_weight) {
  require_same_dim(u.dim(), grid.dim(), "add_on_grid: u");
  require_same_dim(v.dim(), grid.dim(), "add_on_grid: v");
  std::vector<double> values(grid.size());
  std::vector<std::uint8_t> finite(grid.size());
  const std::size_t n = grid.dim();
  parallel_for(grid.size(), [&](std::size_t node) {
    std::array<double, 16> buf{};
    const std::span<double> x(buf.data(), n);
    grid.point(node, x);
    const double a = value_or_inf(u, x);
    const double b = value_or_inf(v, x);
    const double s = std::isfinite(a) && std::isfinite(b) ? a + v_weight * b : kInf;
    values[node] = s;
    finite[node] = std::isfinite(s) ? 1 : 0;
  });
  return ConvexFunction::from_grid(grid, std::move(values), std::move(finite), GridCheck::none);
}

std::optional<ConvexFunction> inf_convolution_closed_form(const ConvexFunction& u,
                                                          const ConvexFunction& v) {
  require_same_dim(u.dim(), v.dim(), "inf_convolution");
  if (is_point_indicator(u)) return add_constant(v, point_offset(u));
  if (is_point_indicator(v)) return add_constant(u, point_offset(v));
  if (const auto* a = u.get_if<Quadratic>()) {
    if (const auto* b = v.get_if<Quadratic>()) {
      const auto ca = conjugate_quadratic(*a);
      const auto cb = conjugate_quadratic(*b);
      const auto& qa = *ca.get_if<Quadratic>();
      const auto& qb = *cb.get_if<Quadratic>();
      return conjugate_quadratic(Quadratic{qa.Q + qb.Q, qa.b + qb.b, qa.c + qb.c});
    }
  }
  if (const auto* a = u.get_if<IndicatorBall>()) {
    if (const auto* b = v.get_if<IndicatorBall>())
      return ConvexFunction::indicator_ball(a->dim, a->radius + b->radius, a->offset + b->offset);
  }
  if (const auto* a = u.get_if<IndicatorBox>()) {
    if (const auto* b = v.get_if<IndicatorBox>())
      return ConvexFunction::indicator_box(a->halfwidths + b->halfwidths, a->offset + b->offset);
  }
  if (const auto* a = u.get_if<NormMultiple>()) {
    if (const auto* b = v.get_if<NormMultiple>())
      return ConvexFunction::norm_multiple(a->dim, std::min(a->a, b->a), a->offset + b->offset);
  }
  if (const auto* a = u.get_if<WeightedL1>()) {
    if (const auto* b = v.get_if<WeightedL1>())
      return ConvexFunction::weighted_l1(a->weights.cwiseMin(b->weights), a->offset + b->offset);
  }
  return std::nullopt;
}

Flagged<ConvexFunction> inf_convolution(const ConvexFunction& u, const ConvexFunction& v,
                                        const GridSpec& result_grid) {
  require_same_dim(u.dim(), result_grid.dim(), "inf_convolution: result grid");
  if (auto closed = inf_convolution_closed_form(u, v)) return {std::move(*closed), {}};
  return AsplundPath(u, v, result_grid).at(1.0);
}

ConvexFunction inf_convolution_bruteforce(const ConvexFunction& u, const ConvexFunction& v,
                                          const GridSpec& result_grid, const GridSpec& search) {
  require_same_dim(u.dim(), v.dim(), "inf_convolution_bruteforce");
  require_same_dim(u.dim(), result_grid.dim(), "inf_convolution_bruteforce: result grid");
  require_same_dim(u.dim(), search.dim(), "inf_convolution_bruteforce: search grid");
  const std::size_t n = u.dim();
  std::vector<Vector> ys;
  std::vector<double> vy;
  for (std::size_t k = 0; k < search.size(); ++k) {
    Vector y = search.point(k);
    const double val = value_or_inf(v, std::span<const double>(y.data(), n));
    if (!std::isfinite(val)) continue;
    ys.push_back(std::move(y));
    vy.push_back(val);
  }
  std::vector<double> values(result_grid.size());
  std::vector<std::uint8_t> finite(result_grid.size());
  parallel_for(result_grid.size(), [&](std::size_t node) {
    const Vector x = result_grid.point(node);
    Vector d(static_cast<Eigen::Index>(n));
    double best = kInf;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      d = x - ys[i];
      const double val = value_or_inf(u, std::span<const double>(d.data(), n)) + vy[i];
      if (val < best) best = val;
    }
    values[node] = best;
    finite[node] = std::isfinite(best) ? 1 : 0;
  });
  return ConvexFunction::from_grid(result_grid, std::move(values), std::move(finite),
                                   GridCheck::none);
}

Flagged<ConvexFunction> asplund_potential(const ConvexFunction& u, const ConvexFunction& v,
                                          double alpha, double beta, const GridSpec& result_grid,
                                          Route route) {
  require_same_dim(u.dim(), v.dim(), "asplund_sum");
  if (!(alpha >= 0.0) || !(beta >= 0.0))
    throw InvalidArgument("asplund_sum: weights must be >= 0");
  auto finish = [&](ConvexFunction w) -> Flagged<ConvexFunction> {
    if (route == Route::grid && !w.is_grid()) return {sample_to_grid(w, result_grid), {}};
    return {std::move(w), {}};
  };
  if (alpha == 0.0 && beta == 0.0) return finish(ConvexFunction::point_indicator(u.dim()));
  if (alpha == 0.0) return finish(scalar_right_mul(v, beta));
  if (beta == 0.0) return finish(scalar_right_mul(u, alpha));
  const ConvexFunction ua = scalar_right_mul(u, alpha);
  const ConvexFunction vb = scalar_right_mul(v, beta);
  if (route == Route::analytic) {
    if (auto closed = inf_convolution_closed_form(ua, vb)) return {std::move(*closed), {}};
  }
  return AsplundPath(ua, vb, result_grid).at(1.0);
}

Flagged<LogConcaveFunction> asplund_sum(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                        double alpha, double beta, const GridSpec& result_grid,
                                        Route route) {
  auto r = asplund_potential(f.potential(), g.potential(), alpha, beta, result_grid, route);
  return {LogConcaveFunction(std::move(r.value)), std::move(r.warnings)};
}

// ---------------------------------------------------------------------------

namespace {

GridSpec default_dual(const ConvexFunction& ug, const ConvexFunction& vg, const GridSpec& result) {
  const std::size_t n = result.dim();
  std::size_t count = 2;
  for (std::size_t k = 0; k < n; ++k) count = std::max(count, result.count(k));
  const GridSpec a = suggest_dual_grid(ug, ug.samples().grid, count);
  const GridSpec b = suggest_dual_grid(vg, vg.samples().grid, count);
  return with_counts(grid_union(a, b, count), result);
}

GridSpec unit_dual_cube(std::size_t n) {
  const std::size_t count = n <= 2 ? 65 : (n == 3 ? 33 : 9);
  return GridSpec::cube(n, 1.0, count);
}

}  // namespace

AsplundPath::AsplundPath(const ConvexFunction& u, const ConvexFunction& v, GridSpec result_grid,
                         std::optional<GridSpec> dual_grid)
    : result_grid_(std::move(result_grid)),
      dual_grid_(GridSpec::cube(1, 1.0, 2)),
      u_star_(ConvexFunction::point_indicator(1)),
      v_star_(ConvexFunction::point_indicator(1)) {
  require_same_dim(u.dim(), v.dim(), "AsplundPath");
  require_same_dim(u.dim(), result_grid_.dim(), "AsplundPath: result grid");
  const ConvexFunction ug = u.is_grid() ? u : sample_to_grid(u, result_grid_);
  const ConvexFunction vg = v.is_grid() ? v : sample_to_grid(v, result_grid_);
  dual_grid_ = dual_grid ? *dual_grid : default_dual(ug, vg, result_grid_);
  require_same_dim(u.dim(), dual_grid_.dim(), "AsplundPath: dual grid");

  auto us = conjugate(ug, dual_grid_, {.refine = true});
  auto vs = conjugate(vg, dual_grid_, {.refine = true});
  merge_warnings(warnings_, us.warnings);
  merge_warnings(warnings_, vs.warnings);
  u_star_ = std::move(us.value);
  v_star_ = std::move(vs.value);

  if (has_mask(ug) || has_mask(vg)) {
    const GridSpec unit = unit_dual_cube(u.dim());
    u_domain_ = domain_support(ug, unit);
    v_domain_ = domain_support(vg, unit);
  }
}

Flagged<ConvexFunction> AsplundPath::at(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("AsplundPath: t must be >= 0");
  const GridSamples& a = u_star_.samples();
  const GridSamples& b = v_star_.samples();
  std::vector<double> w(a.values.size());
  std::vector<std::uint8_t> finite(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const bool fin = a.finite[k] && (t == 0.0 || b.finite[k]);
    finite[k] = fin ? 1 : 0;
    w[k] = fin ? (t == 0.0 ? a.values[k] : a.values[k] + t * b.values[k]) : kInf;
  }
  const ConvexFunction sum = ConvexFunction::from_grid(dual_grid_, std::move(w), std::move(finite),
                                                       GridCheck::none);
  Flagged<ConvexFunction> out = fast_conjugate(sum.samples(), result_grid_, true);
  merge_warnings(out.warnings, warnings_);
  if (!u_domain_) return out;

  // Distance (l1) from each result node to dom u + t dom v.
  const GridSamples& su = u_domain_->samples();
  const GridSamples& sv = v_domain_->samples();
  std::vector<double> sigma(su.values.size());
  for (std::size_t k = 0; k < sigma.size(); ++k)
    sigma[k] = t == 0.0 ? su.values[k] : su.values[k] + t * sv.values[k];
  std::vector<std::uint8_t> all(sigma.size(), 1);
  const ConvexFunction support =
      ConvexFunction::from_grid(su.grid, std::move(sigma), std::move(all), GridCheck::none);
  const auto dist = fast_conjugate(support.samples(), result_grid_, false).value;
  const double threshold = 0.5 * result_grid_.min_spacing();

  const GridSamples& r = out.value.samples();
  std::vector<double> values = r.values;
  std::vector<std::uint8_t> mask = r.finite;
  const auto& d = dist.samples().values;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (d[k] > threshold) {
      values[k] = kInf;
      mask[k] = 0;
    }
  }
  out.value =
      ConvexFunction::from_grid(result_grid_, std::move(values), std::move(mask), GridCheck::none);
  return out;
}

Flagged<ConvexFunction> support_function(const LogConcaveFunction& f, const GridSpec& dual_grid) {
  return conjugate(f.potential(), dual_grid, {.refine = true});
}

BijectionReport gradient_bijection_check(const ConvexFunction& u, const std::vector<Vector>& points,
                                         const GridSpec& dual_grid) {
  BijectionReport report;
  auto conj = conjugate(u, dual_grid);
  report.warnings = conj.warnings;
  const ConvexFunction& us = conj.value;
  for (const Vector& x : points) {
    const EvalResult e = evaluate(u, x);
    if (!e.gradient) throw GradientUnavailable("gradient_bijection_check: no gradient of u at a sample point");
    const Vector& y = *e.gradient;
    EvalResult es;
    try {
      es = evaluate(us, y);
    } catch (const OutOfDomain&) {
      throw GradientUnavailable("gradient_bijection_check: grad u(x) lies outside the dual grid");
    }
    if (!es.gradient) throw GradientUnavailable("gradient_bijection_check: no gradient of u* at grad u(x)");
    report.inverse_residual = std::max(report.inverse_residual, (*es.gradient - x).norm());
    report.fenchel_residual =
        std::max(report.fenchel_residual, std::abs(es.value + e.value - x.dot(y)));
    ++report.points;
  }
  return report;
}

double asplund_derivative_residual(const ConvexFunction& u, const ConvexFunction& v, double t,
                                   const Vector& x, double dt) {
  if (!(t > 0.0) || !(dt > 0.0)) throw InvalidArgument("asplund_derivative_residual: t, dt > 0");
  auto member = [&](double s) {
    auto w = inf_convolution_closed_form(u, scalar_right_mul(v, s));
    if (!w) throw InvalidArgument("asplund_derivative_residual: needs closed-form presets");
    return *w;
  };
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  double derivative;
  if (t > dt) {
    derivative = (value_or_inf(member(t + dt), xs) - value_or_inf(member(t - dt), xs)) / (2.0 * dt);
  } else {
    derivative = (value_or_inf(member(t + dt), xs) - value_or_inf(member(t), xs)) / dt;
  }
  const EvalResult e = evaluate(member(t), x);
  if (!e.gradient) throw GradientUnavailable("asplund_derivative_residual: u_t has no gradient");
  const auto vstar = conjugate_closed_form(v);
  const double psi = value_or_inf(*vstar, std::span<const double>(e.gradient->data(), x.size()));
  return std::abs(derivative + psi);
}

}  // namespace lcq
