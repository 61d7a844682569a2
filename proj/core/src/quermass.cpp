#include "lcq/quermass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>

#include "lcq/errors.hpp"
#include "lcq/parallel.hpp"

namespace lcq {
namespace {

void check_j(std::size_t n, std::size_t j) {
  if (j >= n)
    throw InvalidArgument("index j must satisfy 0 <= j <= n-1 (got j=" + std::to_string(j) +
                          ", n=" + std::to_string(n) + ")");
}

double density(double w) { return std::isfinite(w) ? std::exp(-w) : 0.0; }

struct Mass {
  double value = 0.0;
  bool closed_form = false;
};

// Trapezoid integral of e^{-w} over `grid` with the tail check.
double quadrature_mass(const ConvexFunction& w, const GridSpec& grid, double tail_tolerance) {
  const std::vector<double> weights = grid.trapezoid_weights();
  const std::size_t n = grid.dim();
  const bool own = w.is_grid() && w.samples().grid == grid;
  double total = 0.0;
  double boundary = 0.0;
  std::vector<double> x(n);
  for (std::size_t node = 0; node < grid.size(); ++node) {
    double value;
    if (own) {
      value = w.samples().finite[node] ? w.samples().values[node] : kInf;
    } else {
      grid.point(node, x);
      value = value_or_inf(w, x);
    }
    const double contribution = weights[node] * density(value);
    total += contribution;
    if (grid.on_boundary(node)) boundary += density(value) * grid.cell_volume();
  }
  if (!(total > 0.0)) throw ImproperFunction("quadrature: zero mass on the working box");
  if (boundary / total > tail_tolerance) {
    std::ostringstream os;
    os << "mass on the box boundary is " << boundary / total << " of the total (budget "
       << tail_tolerance << "); enlarge the working box";
    throw TailMassExceeded(os.str());
  }
  return total;
}

Mass mass_of(const ConvexFunction& w, const GridSpec& grid, const EngineConfig& cfg) {
  if (cfg.mass_rule == MassRule::automatic) {
    if (auto m = closed_form_mass(w)) return {*m, true};
  }
  const GridSpec& lattice = w.is_grid() ? w.samples().grid : grid;
  return {quadrature_mass(w, lattice, cfg.tail_tolerance), false};
}

GridSpec ambient_for(const LogConcaveFunction& f, const EngineConfig& cfg, double growth = 0.0) {
  if (cfg.ambient) return *cfg.ambient;
  GridSpec box = f.suggested_box(cfg.count);
  if (growth <= 0.0 || f.potential().is_grid()) return box;
  std::vector<Axis> axes = box.axes();
  for (auto& a : axes) {
    const double c = 0.5 * (a.lo + a.hi);
    const double h = 0.5 * (a.hi - a.lo) * (1.0 + growth);
    a.lo = c - h;
    a.hi = c + h;
  }
  return GridSpec(std::move(axes));
}

std::vector<Subspace> subspaces_for(std::size_t n, std::size_t i, const EngineConfig& cfg) {
  if (i == n) return {Subspace::whole_space(n)};
  if (cfg.mode == SubspaceMode::axis) return axis_subspaces(n, i);
  if (cfg.samples == 0) throw InvalidArgument("Monte Carlo mode needs at least one sample");
  return haar_samples(cfg.seed, cfg.samples, n, i);
}

struct Lattices {
  GridSpec target;
  std::optional<GridSpec> fiber;
};

Lattices lattices_for(const Subspace& xi, const GridSpec& ambient, const EngineConfig& cfg) {
  if (xi.is_identity()) return {ambient, std::nullopt};
  Lattices l{subspace_grid(ambient, xi.basis(), cfg.subspace_count), std::nullopt};
  if (xi.sub_dim() < xi.ambient_dim())
    l.fiber = subspace_grid(ambient, xi.complement(), cfg.subspace_count);
  return l;
}

// J_i for one subspace, with the projection warnings appended to `warnings`.
Mass subspace_mass(const ConvexFunction& u, const Subspace& xi, const GridSpec& ambient,
                   const EngineConfig& cfg, std::vector<std::string>& warnings) {
  const Lattices l = lattices_for(xi, ambient, cfg);
  auto projected = project_potential(u, xi, l.target, l.fiber, cfg.projection);
  merge_warnings(warnings, projected.warnings);
  return mass_of(projected.value, l.target, cfg);
}

Provenance provenance(const EngineConfig& cfg, const GridSpec& ambient, bool with_t) {
  Provenance p;
  p.mode = std::string(to_string(cfg.mode));
  p.samples = cfg.mode == SubspaceMode::mc ? cfg.samples : 0;
  p.seed = cfg.seed;
  p.ambient = ambient.describe();
  if (with_t) {
    p.t_steps = cfg.t_steps;
    p.route = std::string(to_string(cfg.route));
  }
  p.mass_rule = std::string(to_string(cfg.mass_rule));
  return p;
}

struct Stats {
  double mean = 0.0;
  double std_error = 0.0;
};

Stats summarise(const std::vector<double>& xs, bool monte_carlo) {
  Stats s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (monte_carlo && xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return s;
}

// Weights c_k with p(0) = sum_k c_k p(t_k) for polynomials of degree < K.
std::vector<double> extrapolation_weights(const std::vector<double>& t) {
  std::vector<double> c(t.size(), 1.0);
  for (std::size_t k = 0; k < t.size(); ++k)
    for (std::size_t m = 0; m < t.size(); ++m)
      if (m != k) c[k] *= (0.0 - t[m]) / (t[k] - t[m]);
  return c;
}

std::vector<double> checked_steps(const std::vector<double>& steps) {
  if (steps.empty()) throw InvalidArgument("t_steps must not be empty");
  std::vector<double> t = steps;
  for (double s : t)
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("t_steps must be positive");
  std::sort(t.begin(), t.end(), std::greater<>());
  if (std::adjacent_find(t.begin(), t.end()) != t.end())
    throw InvalidArgument("t_steps must be distinct");
  return t;
}

bool is_monte_carlo(std::size_t n, std::size_t i, const EngineConfig& cfg) {
  return i < n && cfg.mode == SubspaceMode::mc;
}

}  // namespace

// ---------------------------------------------------------------------------

double omega(std::size_t k) {
  const double h = 0.5 * static_cast<double>(k);
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

std::vector<double> omega_table(std::size_t n_max) {
  std::vector<double> t(n_max + 1);
  for (std::size_t k = 0; k <= n_max; ++k) t[k] = omega(k);
  return t;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed_form";
    case Method::quadrature: return "quadrature";
    case Method::fd: return "fd";
    case Method::representation: return "representation";
  }
  return "?";
}

std::string_view to_string(SubspaceMode m) { return m == SubspaceMode::axis ? "axis" : "mc"; }

std::string_view to_string(MassRule m) {
  return m == MassRule::automatic ? "automatic" : "quadrature";
}

std::string_view to_string(Route r) { return r == Route::analytic ? "analytic" : "grid"; }

std::optional<double> closed_form_mass(const ConvexFunction& w) {
  const auto m = static_cast<double>(w.dim());
  if (const auto* q = w.get_if<Quadratic>()) {
    const Eigen::LLT<Matrix> llt(q->Q);
    const Vector Qib = llt.solve(q->b);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return std::exp(-q->c + 0.5 * q->b.dot(Qib) + 0.5 * m * std::log(2.0 * std::numbers::pi) -
                    0.5 * logdet);
  }
  if (const auto* b = w.get_if<IndicatorBall>())
    return omega(b->dim) * std::pow(b->radius, m) * std::exp(-b->offset);
  if (const auto* b = w.get_if<IndicatorBox>())
    return (2.0 * b->halfwidths.array()).prod() * std::exp(-b->offset);
  if (const auto* nm = w.get_if<NormMultiple>()) {
    if (!(nm->a > 0.0)) throw InvalidArgument("e^{-a|x|} with a = 0 is not integrable");
    return std::tgamma(m + 1.0) * omega(nm->dim) / std::pow(nm->a, m) * std::exp(-nm->offset);
  }
  if (const auto* wl = w.get_if<WeightedL1>()) {
    if ((wl->weights.array() <= 0.0).any())
      throw InvalidArgument("e^{-sum w|x_k|} with a zero weight is not integrable");
    return (2.0 / wl->weights.array()).prod() * std::exp(-wl->offset);
  }
  return std::nullopt;
}

QuermassResult total_mass(const LogConcaveFunction& f, const GridSpec& grid,
                          const EngineConfig& config) {
  if (grid.dim() != f.dim()) throw DimensionMismatch("total_mass: grid", f.dim(), grid.dim());
  const Mass m = mass_of(f.potential(), grid, config);
  QuermassResult r;
  r.value = m.value;
  r.method = m.closed_form ? Method::closed_form : Method::quadrature;
  r.config = provenance(config, grid, false);
  r.subspaces = 1;
  return r;
}

QuermassResult i_total_mass(const LogConcaveFunction& f, const Subspace& xi,
                            const EngineConfig& config) {
  if (xi.ambient_dim() != f.dim())
    throw DimensionMismatch("i_total_mass: subspace", f.dim(), xi.ambient_dim());
  const GridSpec ambient = ambient_for(f, config);
  QuermassResult r;
  const Mass m = subspace_mass(f.potential(), xi, ambient, config, r.warnings);
  r.value = m.value;
  r.method = m.closed_form ? Method::closed_form : Method::quadrature;
  r.config = provenance(config, ambient, false);
  r.subspaces = 1;
  return r;
}

QuermassResult zeroth_total_mass(const LogConcaveFunction& f) {
  QuermassResult r;
  r.value = omega(f.dim());
  r.method = Method::closed_form;
  r.subspaces = 0;
  return r;
}

QuermassResult quermassintegral(const LogConcaveFunction& f, std::size_t j,
                                const EngineConfig& config) {
  const std::size_t n = f.dim();
  check_j(n, j);
  const std::size_t i = n - j;
  const GridSpec ambient = ambient_for(f, config);
  const auto subspaces = subspaces_for(n, i, config);

  std::vector<double> masses(subspaces.size());
  std::vector<std::vector<std::string>> warnings(subspaces.size());
  std::vector<std::uint8_t> closed(subspaces.size());
  parallel_for(subspaces.size(), [&](std::size_t s) {
    const Mass m = subspace_mass(f.potential(), subspaces[s], ambient, config, warnings[s]);
    masses[s] = m.value;
    closed[s] = m.closed_form ? 1 : 0;
  });

  const Stats st = summarise(masses, is_monte_carlo(n, i, config));
  const double factor = omega(n) / omega(i);
  QuermassResult r;
  r.value = factor * st.mean;
  r.std_error = factor * st.std_error;
  r.method = std::all_of(closed.begin(), closed.end(), [](auto c) { return c != 0; })
                 ? Method::closed_form
                 : Method::quadrature;
  r.config = provenance(config, ambient, false);
  r.subspaces = subspaces.size();
  for (const auto& w : warnings) merge_warnings(r.warnings, w);
  return r;
}

ConvexFunction reduce_translation(const ConvexFunction& v) {
  if (v.get_if<Quadratic>() || v.is_grid()) {
    const Vector x0 = minimizer(v);
    if (x0.isZero(0.0)) return v;
    return translate(v, -x0);
  }
  return v;
}

QuermassResult mixed_quermass_fd(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                 std::size_t j, const EngineConfig& config) {
  const std::size_t n = f.dim();
  if (g.dim() != n) throw DimensionMismatch("mixed_quermass_fd: g", n, g.dim());
  check_j(n, j);
  const std::size_t i = n - j;
  const std::vector<double> ts = checked_steps(config.t_steps);
  const ConvexFunction& u = f.potential();
  const ConvexFunction v = reduce_translation(g.potential());
  const GridSpec ambient = ambient_for(f, config, ts.front());

  QuermassResult r;
  // members[0] is t = 0, members[k + 1] is ts[k]
  std::vector<ConvexFunction> members;
  bool closed = config.route == Route::analytic;
  if (closed) {
    for (double t : ts) closed = closed && inf_convolution_closed_form(u, scalar_right_mul(v, t));
  }
  if (closed) {
    members.push_back(u);
    for (double t : ts) members.push_back(*inf_convolution_closed_form(u, scalar_right_mul(v, t)));
  } else {
    const AsplundPath path(u, v, ambient);
    {
      auto m = path.at(0.0);
      merge_warnings(r.warnings, m.warnings);
      members.push_back(std::move(m.value));
    }
    for (double t : ts) {
      auto m = path.at(t);
      merge_warnings(r.warnings, m.warnings);
      members.push_back(std::move(m.value));
    }
  }

  const auto subspaces = subspaces_for(n, i, config);
  const std::size_t steps = ts.size();
  std::vector<std::vector<double>> slopes(subspaces.size(), std::vector<double>(steps));
  std::vector<std::vector<std::string>> warnings(subspaces.size());
  std::vector<double> base_mass(subspaces.size());
  parallel_for(subspaces.size(), [&](std::size_t s) {
    const Mass base = subspace_mass(members[0], subspaces[s], ambient, config, warnings[s]);
    base_mass[s] = base.value;
    for (std::size_t k = 0; k < steps; ++k) {
      const Mass m = subspace_mass(members[k + 1], subspaces[s], ambient, config, warnings[s]);
      slopes[s][k] = (m.value - base.value) / ts[k];
    }
  });
  for (const auto& w : warnings) merge_warnings(r.warnings, w);
  for (double b : base_mass)
    if (!std::isfinite(b)) throw Error("mixed_quermass_fd: non-finite W_j(f)");

  const std::vector<double> c = extrapolation_weights(ts);
  std::vector<double> extrapolated(subspaces.size());
  std::vector<double> coarse(subspaces.size());
  const std::vector<double> c_drop =
      steps >= 2 ? extrapolation_weights(std::vector<double>(ts.begin() + 1, ts.end()))
                 : std::vector<double>{};
  for (std::size_t s = 0; s < subspaces.size(); ++s) {
    double e = 0.0;
    for (std::size_t k = 0; k < steps; ++k) e += c[k] * slopes[s][k];
    extrapolated[s] = e;
    double d = 0.0;
    for (std::size_t k = 0; k + 1 < steps; ++k) d += c_drop[k] * slopes[s][k + 1];
    coarse[s] = steps >= 2 ? d : e;
  }
  for (double e : extrapolated)
    if (!std::isfinite(e)) throw Error("mixed_quermass_fd: non-finite difference quotient");

  const bool mc = is_monte_carlo(n, i, config);
  const Stats st = summarise(extrapolated, mc);
  const Stats st_coarse = summarise(coarse, false);
  const double factor = omega(n) / omega(i) / static_cast<double>(n - j);
  r.value = factor * st.mean;
  r.std_error = factor * st.std_error;
  r.method = Method::fd;
  r.config = provenance(config, ambient, true);
  r.subspaces = subspaces.size();
  const double scale = std::max(std::abs(st.mean), 1e-300);
  r.residual = std::abs(st.mean - st_coarse.mean) / scale;
  if (steps < 2) {
    r.warnings.push_back("fd: a single t step gives no extrapolation check");
  } else if (r.residual > config.extrapolation_budget &&
             std::abs(st.mean - st_coarse.mean) > 1e-9) {
    std::ostringstream os;
    os << "fd: extrapolation not converged (relative change " << r.residual << " > budget "
       << config.extrapolation_budget << ")";
    r.warnings.push_back(os.str());
  }
  return r;
}

QuermassResult mixed_quermass_representation(const LogConcaveFunction& f,
                                             const LogConcaveFunction& g, std::size_t j,
                                             const EngineConfig& config) {
  const std::size_t n = f.dim();
  if (g.dim() != n) throw DimensionMismatch("mixed_quermass_representation: g", n, g.dim());
  check_j(n, j);
  const std::size_t i = n - j;
  const ConvexFunction& u = f.potential();
  const ConvexFunction v = reduce_translation(g.potential());
  const GridSpec ambient = ambient_for(f, config);
  if (!u.get_if<Quadratic>() && !u.is_grid())
    throw GradientUnavailable(
        "mixed_quermass_representation: f must be a quadratic preset or a grid form");

  QuermassResult r;
  std::optional<ConvexFunction> vstar = conjugate_closed_form(v);
  if (!vstar) {
    const std::size_t count = std::max<std::size_t>(config.count, 2);
    const GridSpec dual = suggest_dual_grid(v, v.samples().grid, count);
    auto c = conjugate(v, dual, {.refine = true});
    merge_warnings(r.warnings, c.warnings);
    vstar = std::move(c.value);
  }

  const auto subspaces = subspaces_for(n, i, config);
  std::vector<double> integrals(subspaces.size());
  std::vector<double> dropped(subspaces.size());
  std::vector<double> totals(subspaces.size());
  std::vector<std::vector<std::string>> warnings(subspaces.size());
  parallel_for(subspaces.size(), [&](std::size_t s) {
    const Subspace& xi = subspaces[s];
    const Lattices l = lattices_for(xi, ambient, config);
    auto projected = project_potential(u, xi, l.target, l.fiber, config.projection);
    merge_warnings(warnings[s], projected.warnings);
    const ConvexFunction& w = projected.value;
    const GridSpec& lattice = w.is_grid() ? w.samples().grid : l.target;
    const std::vector<double> weights = lattice.trapezoid_weights();
    double integral = 0.0, lost = 0.0, total = 0.0;
    for (std::size_t node = 0; node < lattice.size(); ++node) {
      const Vector x = lattice.point(node);
      const EvalResult e = evaluate(w, x);
      if (!e.finite()) continue;
      const double mass = weights[node] * std::exp(-e.value);
      total += mass;
      if (!e.gradient) {
        lost += mass;
        continue;
      }
      const Vector y = xi.basis() * *e.gradient;
      const double psi = value_or_inf(*vstar, std::span<const double>(y.data(), n));
      if (!std::isfinite(psi)) {
        lost += mass;
        continue;
      }
      integral += psi * mass;
    }
    integrals[s] = integral;
    dropped[s] = lost;
    totals[s] = total;
  });
  for (const auto& w : warnings) merge_warnings(r.warnings, w);
  double lost = 0.0, total = 0.0;
  for (std::size_t s = 0; s < subspaces.size(); ++s) {
    lost += dropped[s];
    total += totals[s];
  }
  if (total > 0.0 && lost / total > 1e-4) {
    std::ostringstream os;
    os << "representation: " << lost / total
       << " of the mass sits where grad(u|xi) or h_g is unavailable and was skipped";
    r.warnings.push_back(os.str());
  }

  const Stats st = summarise(integrals, is_monte_carlo(n, i, config));
  const double factor = omega(n) / omega(i) / static_cast<double>(n - j);
  r.value = factor * st.mean;
  r.std_error = factor * st.std_error;
  r.method = Method::representation;
  r.config = provenance(config, ambient, false);
  r.subspaces = subspaces.size();
  return r;
}

BlaschkePetkantschinReport blaschke_petkantschin_check(const LogConcaveFunction& f, std::size_t i,
                                                       const EngineConfig& config,
                                                       double quadrature_budget) {
  const std::size_t n = f.dim();
  if (i == 0 || i > n) throw InvalidArgument("blaschke_petkantschin_check: need 1 <= i <= n");
  const ConvexFunction& u = f.potential();
  const GridSpec ambient = ambient_for(f, config);
  BlaschkePetkantschinReport rep;
  rep.lhs = quadrature_mass(u, ambient, config.tail_tolerance);

  const auto subspaces = subspaces_for(n, i, config);
  std::vector<double> inner(subspaces.size());
  parallel_for(subspaces.size(), [&](std::size_t s) {
    const Subspace& xi = subspaces[s];
    const GridSpec base = subspace_grid(ambient, xi.basis(), config.subspace_count);
    std::vector<Axis> axes = base.axes();
    for (auto& a : axes) {
      if (a.count % 2 == 1) {
        const double h = a.spacing();
        a.lo += 0.5 * h;
        a.hi += 0.5 * h;
      }
    }
    const GridSpec lattice(std::move(axes));
    const std::vector<double> weights = lattice.trapezoid_weights();
    double acc = 0.0;
    for (std::size_t node = 0; node < lattice.size(); ++node) {
      const Vector x = lattice.point(node);
      const Vector p = xi.basis() * x;
      const double fx = density(value_or_inf(u, std::span<const double>(p.data(), n)));
      if (fx == 0.0) continue;
      acc += weights[node] * fx * std::pow(x.norm(), static_cast<double>(n - i));
    }
    inner[s] = acc;
  });
  const Stats st = summarise(inner, is_monte_carlo(n, i, config));
  const double ratio = omega(n) / omega(i);
  const double factor = static_cast<double>(n) / static_cast<double>(i) * ratio;
  rep.rhs = factor * st.mean;
  rep.rhs_alt_constant = ratio * st.mean;
  rep.std_error = factor * st.std_error;
  rep.relative_gap = std::abs(rep.lhs - rep.rhs) / rep.lhs;
  rep.budget = 2.0 * rep.std_error / rep.lhs + quadrature_budget;
  rep.pass = rep.relative_gap <= rep.budget;
  return rep;
}

ExistenceBoundReport existence_bound_check(const LogConcaveFunction& f,
                                           const LogConcaveFunction& g, std::size_t j,
                                           const EngineConfig& config) {
  const std::size_t n = f.dim();
  check_j(n, j);
  ExistenceBoundReport rep;
  rep.d = infimum(reduce_translation(g.potential()));
  rep.w_j = quermassintegral(f, j, config).value;
  rep.mixed = mixed_quermass_fd(f, g, j, config);
  const double nj = static_cast<double>(n - j);
  rep.bound = -std::max(rep.d, 0.0) * rep.w_j / nj;
  rep.tolerance = 3.0 * rep.mixed.std_error + config.extrapolation_budget * std::abs(rep.w_j) / nj;
  rep.satisfied = rep.mixed.value >= rep.bound - rep.tolerance;
  rep.marginal = rep.satisfied && rep.mixed.value < rep.bound + rep.tolerance;
  return rep;
}

PrekopaLeindlerReport prekopa_leindler_check(const LogConcaveFunction& f,
                                             const LogConcaveFunction& g, double lambda,
                                             const EngineConfig& config) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw InvalidArgument("prekopa_leindler_check: lambda must lie in (0, 1)");
  if (g.dim() != f.dim()) throw DimensionMismatch("prekopa_leindler_check: g", f.dim(), g.dim());
  PrekopaLeindlerReport rep;
  const GridSpec box_f = ambient_for(f, config);
  const GridSpec box_g = config.ambient ? *config.ambient : g.suggested_box(config.count);
  const GridSpec box = config.ambient ? *config.ambient : grid_union(box_f, box_g, config.count);
  auto sum = asplund_potential(f.potential(), g.potential(), lambda, 1.0 - lambda, box,
                               Route::analytic);
  rep.warnings = sum.warnings;
  rep.lhs = mass_of(sum.value, box, config).value;
  const double jf = mass_of(f.potential(), box_f, config).value;
  const double jg = mass_of(g.potential(), box_g, config).value;
  rep.rhs = std::pow(jf, lambda) * std::pow(jg, 1.0 - lambda);
  rep.relative_gap = (rep.lhs - rep.rhs) / rep.rhs;
  return rep;
}

HomogeneityReport homogeneity_check(const LogConcaveFunction& f, std::size_t j, double lambda,
                                    const EngineConfig& config) {
  if (!(lambda > 0.0)) throw InvalidArgument("homogeneity_check: lambda must be positive");
  const std::size_t n = f.dim();
  check_j(n, j);
  EngineConfig cfg = config;
  cfg.ambient.reset();
  const LogConcaveFunction scaled(scalar_right_mul(f.potential(), lambda));
  const LogConcaveFunction power(scale_values(f.potential(), lambda));
  HomogeneityReport rep;
  rep.lhs = quermassintegral(scaled, j, cfg).value;
  rep.rhs = std::pow(lambda, static_cast<double>(n - j)) * quermassintegral(power, j, cfg).value;
  rep.relative_gap = std::abs(rep.lhs - rep.rhs) / std::abs(rep.rhs);
  return rep;
}

}  // namespace lcq
