#include "lcq/convex_function.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "lcq/errors.hpp"
#include "lcq/parallel.hpp"

namespace lcq {
namespace {

constexpr std::size_t kMaxGridDim = 10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double inside_tol(double r) { return 1e-12 * std::max(1.0, r); }

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// Multilinear interpolation. Sets `outside` when x leaves the box.
double interpolate(const GridSamples& s, std::span<const double> x, bool& outside) {
  const GridSpec& g = s.grid;
  const std::size_t n = g.dim();
  std::array<std::size_t, kMaxGridDim> base{};
  std::array<double, kMaxGridDim> frac{};
  outside = false;
  for (std::size_t k = 0; k < n; ++k) {
    const Axis& a = g.axis(k);
    const double h = a.spacing();
    double t = (x[k] - a.lo) / h;
    const double last = static_cast<double>(a.count - 1);
    if (t < -1e-9 || t > last + 1e-9) {
      outside = true;
      return kInf;
    }
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-9) t = r;
    t = std::clamp(t, 0.0, last);
    auto i0 = static_cast<std::size_t>(std::floor(t));
    if (i0 + 1 >= a.count) i0 = a.count - 2;
    base[k] = i0;
    frac[k] = t - static_cast<double>(i0);
  }
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const bool up = (c >> k) & 1U;
      w *= up ? frac[k] : 1.0 - frac[k];
      flat += (base[k] + (up ? 1 : 0)) * g.stride(k);
    }
    if (w == 0.0) continue;
    if (!s.finite[flat]) return kInf;
    acc += w * s.values[flat];
  }
  return acc;
}

double preset_value(const ConvexFunction::Form& form, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [&](const Quadratic& q) {
            const Eigen::Map<const Vector> v(x.data(), static_cast<Eigen::Index>(x.size()));
            return 0.5 * v.dot(q.Q * v) + q.b.dot(v) + q.c;
          },
          [&](const IndicatorBall& ball) {
            const double r = std::sqrt(squared_norm(x));
            return r <= ball.radius + inside_tol(ball.radius) ? ball.offset : kInf;
          },
          [&](const IndicatorBox& box) {
            for (std::size_t k = 0; k < x.size(); ++k) {
              const double h = box.halfwidths[static_cast<Eigen::Index>(k)];
              if (std::abs(x[k]) > h + inside_tol(h)) return kInf;
            }
            return box.offset;
          },
          [&](const NormMultiple& nm) { return nm.a * std::sqrt(squared_norm(x)) + nm.offset; },
          [&](const WeightedL1& wl) {
            double s = wl.offset;
            for (std::size_t k = 0; k < x.size(); ++k)
              s += wl.weights[static_cast<Eigen::Index>(k)] * std::abs(x[k]);
            return s;
          },
          [&](const std::shared_ptr<const GridSamples>& gs) {
            bool outside = false;
            return interpolate(*gs, x, outside);
          },
      },
      form);
}

void require_dim(const ConvexFunction& u, std::size_t got, const char* where) {
  if (u.dim() != got) throw DimensionMismatch(where, u.dim(), got);
}

bool is_positive_definite(const Matrix& Q) {
  if (Q.rows() != Q.cols() || Q.rows() == 0) return false;
  if (!Q.isApprox(Q.transpose(), 1e-12)) return false;
  Eigen::LLT<Matrix> llt(Q);
  return llt.info() == Eigen::Success;
}

}  // namespace

// ---------------------------------------------------------------------------
// construction

ConvexFunction ConvexFunction::quadratic(Matrix Q, Vector b, double c) {
  if (Q.rows() != b.size())
    throw DimensionMismatch("quadratic: b", static_cast<std::size_t>(Q.rows()),
                            static_cast<std::size_t>(b.size()));
  if (!is_positive_definite(Q))
    throw InvalidArgument("quadratic: Q must be symmetric positive definite");
  if (!std::isfinite(c)) throw InvalidArgument("quadratic: c must be finite");
  const auto n = static_cast<std::size_t>(Q.rows());
  Matrix sym = 0.5 * (Q + Q.transpose());
  return ConvexFunction(Quadratic{std::move(sym), std::move(b), c}, n);
}

ConvexFunction ConvexFunction::half_squared_norm(std::size_t dim) {
  return quadratic(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)),
                   Vector::Zero(static_cast<Eigen::Index>(dim)), 0.0);
}

ConvexFunction ConvexFunction::indicator_ball(std::size_t dim, double radius, double offset) {
  if (dim == 0) throw InvalidArgument("indicator_ball: dim must be positive");
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw InvalidArgument("indicator_ball: radius must be >= 0");
  return ConvexFunction(IndicatorBall{dim, radius, offset}, dim);
}

ConvexFunction ConvexFunction::point_indicator(std::size_t dim) {
  return indicator_ball(dim, 0.0, 0.0);
}

ConvexFunction ConvexFunction::indicator_box(Vector halfwidths, double offset) {
  if (halfwidths.size() == 0) throw InvalidArgument("indicator_box: empty halfwidths");
  if ((halfwidths.array() < 0.0).any() || !halfwidths.allFinite())
    throw InvalidArgument("indicator_box: halfwidths must be >= 0");
  const auto n = static_cast<std::size_t>(halfwidths.size());
  return ConvexFunction(IndicatorBox{std::move(halfwidths), offset}, n);
}

ConvexFunction ConvexFunction::norm_multiple(std::size_t dim, double a, double offset) {
  if (dim == 0) throw InvalidArgument("norm_multiple: dim must be positive");
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("norm_multiple: a must be >= 0");
  return ConvexFunction(NormMultiple{dim, a, offset}, dim);
}

ConvexFunction ConvexFunction::weighted_l1(Vector weights, double offset) {
  if (weights.size() == 0) throw InvalidArgument("weighted_l1: empty weights");
  if ((weights.array() < 0.0).any() || !weights.allFinite())
    throw InvalidArgument("weighted_l1: weights must be >= 0");
  const auto n = static_cast<std::size_t>(weights.size());
  return ConvexFunction(WeightedL1{std::move(weights), offset}, n);
}

ConvexFunction ConvexFunction::from_grid(GridSpec grid, std::vector<double> values,
                                         std::vector<std::uint8_t> finite, GridCheck check) {
  if (grid.dim() > kMaxGridDim)
    throw InvalidArgument("grid form supports at most " + std::to_string(kMaxGridDim) + " axes");
  if (values.size() != grid.size() || finite.size() != grid.size())
    throw InvalidArgument("from_grid: value/mask length does not match the grid");
  bool any = false;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (finite[k] && !std::isfinite(values[k]))
      throw InvalidArgument("from_grid: non-finite value at an unmasked node");
    if (!finite[k]) values[k] = kInf;
    any = any || finite[k];
  }
  if (!any) throw ImproperFunction("from_grid: every node is masked");
  const std::size_t n = grid.dim();
  auto samples = std::make_shared<const GridSamples>(
      GridSamples{std::move(grid), std::move(values), std::move(finite)});
  if (check == GridCheck::convexity && !is_discretely_convex(*samples))
    throw ConvexityViolation(
        "grid samples are not discretely convex along some axis; refine the grid");
  return ConvexFunction(std::move(samples), n);
}

bool ConvexFunction::is_grid() const noexcept {
  return std::holds_alternative<std::shared_ptr<const GridSamples>>(form_);
}

const GridSamples& ConvexFunction::samples() const {
  if (!is_grid()) throw InvalidArgument("samples(): function is not in grid form");
  return *std::get<std::shared_ptr<const GridSamples>>(form_);
}

std::string_view ConvexFunction::kind() const noexcept {
  switch (form_.index()) {
    case 0: return "quadratic";
    case 1: return "indicator_ball";
    case 2: return "indicator_box";
    case 3: return "norm_multiple";
    case 4: return "weighted_l1";
    default: return "grid";
  }
}

bool ConvexFunction::is_smooth() const noexcept {
  return std::holds_alternative<Quadratic>(form_);
}

// ---------------------------------------------------------------------------
// evaluation

double value_or_inf(const ConvexFunction& u, std::span<const double> x) {
  return preset_value(u.form(), x);
}

EvalResult evaluate(const ConvexFunction& u, const Vector& x) {
  require_dim(u, static_cast<std::size_t>(x.size()), "evaluate");
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  EvalResult out;
  if (const auto* q = u.get_if<Quadratic>()) {
    out.value = preset_value(u.form(), xs);
    out.gradient = q->Q * x + q->b;
    return out;
  }
  if (!u.is_grid()) {
    out.value = preset_value(u.form(), xs);
    return out;
  }
  const GridSamples& s = u.samples();
  bool outside = false;
  out.value = interpolate(s, xs, outside);
  if (outside) throw OutOfDomain("evaluate: point outside the grid box");
  if (!out.finite()) return out;

  // Central differences with the lattice spacing; boundary points get none.
  const std::size_t n = u.dim();
  Vector grad(static_cast<Eigen::Index>(n));
  std::vector<double> probe(xs.begin(), xs.end());
  for (std::size_t k = 0; k < n; ++k) {
    const double h = s.grid.spacing(k);
    probe[k] = xs[k] + h;
    bool out_hi = false;
    const double up = interpolate(s, probe, out_hi);
    probe[k] = xs[k] - h;
    bool out_lo = false;
    const double dn = interpolate(s, probe, out_lo);
    probe[k] = xs[k];
    if (out_hi || out_lo || !std::isfinite(up) || !std::isfinite(dn)) return out;
    grad[static_cast<Eigen::Index>(k)] = (up - dn) / (2.0 * h);
  }
  out.gradient = std::move(grad);
  return out;
}

ConvexFunction sample_to_grid(const ConvexFunction& u, const GridSpec& grid) {
  require_dim(u, grid.dim(), "sample_to_grid");
  std::vector<double> values(grid.size());
  std::vector<std::uint8_t> finite(grid.size());
  const std::size_t n = grid.dim();
  parallel_for(grid.size(), [&](std::size_t node) {
    std::array<double, 64> buf{};
    std::vector<double> heap;
    std::span<double> x;
    if (n <= buf.size()) {
      x = std::span<double>(buf.data(), n);
    } else {
      heap.resize(n);
      x = heap;
    }
    grid.point(node, x);
    const double v = value_or_inf(u, x);
    finite[node] = std::isfinite(v) ? 1 : 0;
    values[node] = v;
  });
  return ConvexFunction::from_grid(grid, std::move(values), std::move(finite),
                                   GridCheck::convexity);
}

bool is_discretely_convex(const GridSamples& s, double rel_tol) {
  const GridSpec& g = s.grid;
  const std::size_t n = g.dim();
  for (std::size_t axis = 0; axis < n; ++axis) {
    const std::size_t len = g.count(axis);
    const std::size_t stride = g.stride(axis);
    const std::size_t lines = g.size() / len;
    for (std::size_t line = 0; line < lines; ++line) {
      // line enumerates (outer, inner) with inner < stride
      const std::size_t outer = line / stride;
      const std::size_t inner = line % stride;
      const std::size_t start = outer * stride * len + inner;
      // contiguous finite run
      int state = 0;  // 0 before run, 1 in run, 2 after run
      for (std::size_t i = 0; i < len; ++i) {
        const bool fin = s.finite[start + i * stride] != 0;
        if (fin && state == 2) return false;
        if (fin) state = 1;
        if (!fin && state == 1) state = 2;
      }
      for (std::size_t i = 1; i + 1 < len; ++i) {
        const std::size_t a = start + (i - 1) * stride;
        const std::size_t b = start + i * stride;
        const std::size_t c = start + (i + 1) * stride;
        if (!(s.finite[a] && s.finite[b] && s.finite[c])) continue;
        const double second = s.values[a] - 2.0 * s.values[b] + s.values[c];
        const double scale =
            1.0 + std::max({std::abs(s.values[a]), std::abs(s.values[b]), std::abs(s.values[c])});
        if (second < -rel_tol * scale) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// class membership

namespace {

std::vector<Vector> shell_directions(std::size_t n) {
  std::vector<Vector> dirs;
  for (std::size_t k = 0; k < n; ++k) {
    for (double sign : {1.0, -1.0}) {
      Vector d = Vector::Zero(static_cast<Eigen::Index>(n));
      d[static_cast<Eigen::Index>(k)] = sign;
      dirs.push_back(d);
    }
  }
  if (n <= 6) {
    const std::size_t combos = std::size_t{1} << n;
    for (std::size_t m = 0; m < combos; ++m) {
      Vector d(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) d[static_cast<Eigen::Index>(k)] = ((m >> k) & 1U) ? -1.0 : 1.0;
      dirs.push_back(d.normalized());
    }
  }
  return dirs;
}

double natural_scale(const ConvexFunction& u) {
  return std::visit(Overloaded{
                        [](const IndicatorBall& b) { return std::max(b.radius, 1.0); },
                        [](const IndicatorBox& b) { return std::max(b.halfwidths.maxCoeff(), 1.0); },
                        [](const auto&) { return 1.0; },
                    },
                    u.form());
}

ClassReport validate_preset(const ConvexFunction& u) {
  ClassReport r;
  r.proper = true;
  r.convex = true;
  const auto dirs = shell_directions(u.dim());
  const double r0 = 4.0 * natural_scale(u);
  std::array<double, 3> radius{r0, 2.0 * r0, 4.0 * r0};
  std::array<double, 3> lowest{};
  for (std::size_t s = 0; s < 3; ++s) {
    double m = kInf;
    for (const auto& d : dirs) {
      const Vector x = radius[s] * d;
      m = std::min(m, value_or_inf(u, std::span<const double>(x.data(), u.dim())));
    }
    lowest[s] = m;
  }
  if (!std::isfinite(lowest[0])) {
    // bounded domain: any linear minorant works outside it
    r.coercive = true;
    r.slope = kInf;
    r.intercept = infimum(u);
    r.superlinear = Tristate::yes;
    return r;
  }
  const double slope1 = (lowest[1] - lowest[0]) / (radius[1] - radius[0]);
  const double slope2 = (lowest[2] - lowest[1]) / (radius[2] - radius[1]);
  r.slope = slope1;
  r.intercept = std::min(lowest[0] - slope1 * radius[0], infimum(u));
  r.coercive = slope1 > 0.0;
  r.superlinear = slope2 > slope1 * (1.0 + 1e-9) + 1e-12 ? Tristate::yes : Tristate::no;
  return r;
}

ClassReport validate_grid(const GridSamples& s) {
  ClassReport r;
  r.proper = std::any_of(s.finite.begin(), s.finite.end(), [](auto f) { return f != 0; });
  r.convex = is_discretely_convex(s);
  r.superlinear = Tristate::undetermined;

  // Least-squares line u ~ a|x| + b through the two outermost node shells.
  const GridSpec& g = s.grid;
  std::vector<std::size_t> idx(g.dim());
  double sr = 0, su = 0, srr = 0, sru = 0;
  std::size_t m = 0, masked = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t node = 0; node < g.size(); ++node) {
    g.unflatten(node, idx);
    std::size_t ring = g.size();
    for (std::size_t k = 0; k < g.dim(); ++k)
      ring = std::min({ring, idx[k], g.count(k) - 1 - idx[k]});
    if (ring > 1) continue;
    if (!s.finite[node]) {
      ++masked;
      continue;
    }
    const double rad = g.point(node).norm();
    pts.emplace_back(rad, s.values[node]);
    sr += rad;
    su += s.values[node];
    srr += rad * rad;
    sru += rad * s.values[node];
    ++m;
  }
  if (m == 0) {
    r.coercive = masked > 0;
    r.slope = kInf;
    r.intercept = 0.0;
    return r;
  }
  const double denom = static_cast<double>(m) * srr - sr * sr;
  if (m < 2 || std::abs(denom) <= 1e-12 * std::max(1.0, srr * static_cast<double>(m))) {
    r.coercive = false;
    return r;
  }
  const double a = (static_cast<double>(m) * sru - sr * su) / denom;
  double b = kInf;
  for (const auto& [rad, val] : pts) b = std::min(b, val - a * rad);
  r.slope = a;
  r.intercept = b;
  r.coercive = a > 0.0;
  return r;
}

}  // namespace

ClassReport validate_class(const ConvexFunction& u) {
  if (u.is_grid()) return validate_grid(u.samples());
  return validate_preset(u);
}

// ---------------------------------------------------------------------------
// arithmetic

ConvexFunction add_constant(const ConvexFunction& u, double constant) {
  return std::visit(
      Overloaded{
          [&](const Quadratic& q) { return ConvexFunction::quadratic(q.Q, q.b, q.c + constant); },
          [&](const IndicatorBall& b) {
            return ConvexFunction::indicator_ball(b.dim, b.radius, b.offset + constant);
          },
          [&](const IndicatorBox& b) {
            return ConvexFunction::indicator_box(b.halfwidths, b.offset + constant);
          },
          [&](const NormMultiple& nm) {
            return ConvexFunction::norm_multiple(nm.dim, nm.a, nm.offset + constant);
          },
          [&](const WeightedL1& w) {
            return ConvexFunction::weighted_l1(w.weights, w.offset + constant);
          },
          [&](const std::shared_ptr<const GridSamples>& gs) {
            std::vector<double> v = gs->values;
            for (auto& x : v) x += constant;
            return ConvexFunction::from_grid(gs->grid, std::move(v), gs->finite, GridCheck::none);
          },
      },
      u.form());
}

ConvexFunction scale_values(const ConvexFunction& u, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("scale_values: lambda must be positive");
  return std::visit(
      Overloaded{
          [&](const Quadratic& q) {
            return ConvexFunction::quadratic(lambda * q.Q, lambda * q.b, lambda * q.c);
          },
          [&](const IndicatorBall& b) {
            return ConvexFunction::indicator_ball(b.dim, b.radius, lambda * b.offset);
          },
          [&](const IndicatorBox& b) {
            return ConvexFunction::indicator_box(b.halfwidths, lambda * b.offset);
          },
          [&](const NormMultiple& nm) {
            return ConvexFunction::norm_multiple(nm.dim, lambda * nm.a, lambda * nm.offset);
          },
          [&](const WeightedL1& w) {
            return ConvexFunction::weighted_l1(lambda * w.weights, lambda * w.offset);
          },
          [&](const std::shared_ptr<const GridSamples>& gs) {
            std::vector<double> v = gs->values;
            for (auto& x : v) x *= lambda;
            return ConvexFunction::from_grid(gs->grid, std::move(v), gs->finite, GridCheck::none);
          },
      },
      u.form());
}

ConvexFunction translate(const ConvexFunction& u, const Vector& shift) {
  require_dim(u, static_cast<std::size_t>(shift.size()), "translate");
  if (const auto* q = u.get_if<Quadratic>()) {
    // 1/2 (x-s)'Q(x-s) + b'(x-s) + c
    const Vector Qs = q->Q * shift;
    return ConvexFunction::quadratic(q->Q, q->b - Qs, q->c + 0.5 * shift.dot(Qs) - q->b.dot(shift));
  }
  if (u.is_grid()) {
    const GridSamples& s = u.samples();
    return ConvexFunction::from_grid(s.grid.translated(shift), s.values, s.finite, GridCheck::none);
  }
  if (shift.isZero(0.0)) return u;
  throw InvalidArgument("translate: centred preset '" + std::string(u.kind()) +
                        "' only supports a zero shift");
}

Vector minimizer(const ConvexFunction& u) {
  const auto n = static_cast<Eigen::Index>(u.dim());
  if (const auto* q = u.get_if<Quadratic>()) return -q->Q.llt().solve(q->b);
  if (u.is_grid()) {
    const GridSamples& s = u.samples();
    std::size_t best = s.grid.size();
    for (std::size_t k = 0; k < s.grid.size(); ++k) {
      if (!s.finite[k]) continue;
      if (best == s.grid.size() || s.values[k] < s.values[best]) best = k;
    }
    return s.grid.point(best);
  }
  return Vector::Zero(n);
}

double infimum(const ConvexFunction& u) {
  const Vector x = minimizer(u);
  if (u.is_grid()) {
    const GridSamples& s = u.samples();
    double m = kInf;
    for (std::size_t k = 0; k < s.grid.size(); ++k)
      if (s.finite[k]) m = std::min(m, s.values[k]);
    return m;
  }
  return value_or_inf(u, std::span<const double>(x.data(), u.dim()));
}

// ---------------------------------------------------------------------------
// log-concave wrapper

LogConcaveFunction LogConcaveFunction::gaussian(std::size_t dim) {
  return LogConcaveFunction(ConvexFunction::half_squared_norm(dim));
}

LogConcaveFunction LogConcaveFunction::characteristic_ball(std::size_t dim, double radius) {
  return LogConcaveFunction(ConvexFunction::indicator_ball(dim, radius));
}

LogConcaveFunction LogConcaveFunction::characteristic_box(Vector halfwidths) {
  return LogConcaveFunction(ConvexFunction::indicator_box(std::move(halfwidths)));
}

double LogConcaveFunction::operator()(const Vector& x) const {
  require_dim(u_, static_cast<std::size_t>(x.size()), "LogConcaveFunction");
  const double v = value_or_inf(u_, std::span<const double>(x.data(), u_.dim()));
  return std::isfinite(v) ? std::exp(-v) : 0.0;
}

GridSpec LogConcaveFunction::suggested_box(std::size_t count, double tail_tolerance) const {
  const std::size_t n = dim();
  const double log_tol = std::log(1.0 / std::clamp(tail_tolerance, 1e-300, 0.5));
  return std::visit(
      Overloaded{
          [&](const Quadratic& q) {
            const Vector mean = -q.Q.llt().solve(q.b);
            Eigen::SelfAdjointEigenSolver<Matrix> es(q.Q);
            const double sigma = 1.0 / std::sqrt(es.eigenvalues().minCoeff());
            const double radius = sigma * std::max(6.0, std::sqrt(2.0 * log_tol));
            std::vector<Axis> axes;
            for (std::size_t k = 0; k < n; ++k)
              axes.push_back({mean[static_cast<Eigen::Index>(k)] - radius,
                              mean[static_cast<Eigen::Index>(k)] + radius, count});
            return GridSpec(std::move(axes));
          },
          [&](const IndicatorBall& b) {
            return GridSpec::cube(n, 1.25 * std::max(b.radius, 1e-3), count);
          },
          [&](const IndicatorBox& b) {
            std::vector<Axis> axes;
            for (std::size_t k = 0; k < n; ++k) {
              const double h = 1.25 * std::max(b.halfwidths[static_cast<Eigen::Index>(k)], 1e-3);
              axes.push_back({-h, h, count});
            }
            return GridSpec(std::move(axes));
          },
          [&](const NormMultiple& nm) {
            if (!(nm.a > 0.0)) throw InvalidArgument("suggested_box: a|x| with a = 0 is not integrable");
            return GridSpec::cube(n, (log_tol + 2.0 * static_cast<double>(n)) / nm.a, count);
          },
          [&](const WeightedL1& w) {
            std::vector<Axis> axes;
            for (std::size_t k = 0; k < n; ++k) {
              const double wk = w.weights[static_cast<Eigen::Index>(k)];
              if (!(wk > 0.0)) throw InvalidArgument("suggested_box: zero weight is not integrable");
              const double h = (log_tol + 2.0) / wk;
              axes.push_back({-h, h, count});
            }
            return GridSpec(std::move(axes));
          },
          [&](const std::shared_ptr<const GridSamples>& gs) { return gs->grid; },
      },
      u_.form());
}

}  // namespace lcq
