#pragma once

#include <optional>
#include <vector>

#include "lcq/convex_function.hpp"
#include "lcq/flagged.hpp"

namespace lcq {

struct ConjugateOptions {
  /// Refine each 1-D maximum with the parabola through the winning node and
  /// its two neighbours. Exact for quadratics; off reproduces the plain
  /// discrete supremum bit-for-bit with the brute-force oracle.
  bool refine = false;
};

/// Closed-form conjugate of an analytic preset; empty for grid forms.
std::optional<ConvexFunction> conjugate_closed_form(const ConvexFunction& u);

/// u*(y) = sup_x <x,y> - u(x).
/// Presets return their closed form (dual_grid unused). Grid forms use the
/// iterated per-axis lower-hull transform, linear in the node count, and
/// return a grid form on dual_grid. A warning is attached when an interior
/// dual node takes its maximum on a face of the primal box.
Flagged<ConvexFunction> conjugate(const ConvexFunction& u, const GridSpec& dual_grid,
                                  ConjugateOptions options = {});

/// Exhaustive max over every finite primal node; grid forms only.
Flagged<ConvexFunction> conjugate_bruteforce(const ConvexFunction& u, const GridSpec& dual_grid);

/// Dual lattice spanning the finite-difference slope range of u on `primal`
/// (u is sampled there when it is a preset), `count` nodes per axis.
GridSpec suggest_dual_grid(const ConvexFunction& u, const GridSpec& primal, std::size_t count);

/// Smallest box holding both lattices, `count` nodes per axis.
GridSpec grid_union(const GridSpec& a, const GridSpec& b, std::size_t count);

/// (u alpha)(x) = alpha u(x / alpha); alpha = 0 gives the indicator of {0}.
ConvexFunction scalar_right_mul(const ConvexFunction& u, double alpha);

/// u + v on a common lattice; presets are evaluated at the nodes.
ConvexFunction add_on_grid(const ConvexFunction& u, const ConvexFunction& v, const GridSpec& grid,
                           double v_weight = 1.0);

/// Closed form of u box v when both are presets of a matching kind (or one
/// is the indicator of the origin).
std::optional<ConvexFunction> inf_convolution_closed_form(const ConvexFunction& u,
                                                          const ConvexFunction& v);

/// (u box v)(x) = inf_y u(x - y) + v(y) on result_grid, via the dual route
/// conj(u* + v*). Closed forms short-circuit. The effective domain
/// dom u + dom v is recovered from the discrete support functions of the
/// two domains.
Flagged<ConvexFunction> inf_convolution(const ConvexFunction& u, const ConvexFunction& v,
                                        const GridSpec& result_grid);

/// Direct min over the nodes of `search` (taken as the y variable).
/// Test oracle; O(|result| * |search|).
ConvexFunction inf_convolution_bruteforce(const ConvexFunction& u, const ConvexFunction& v,
                                          const GridSpec& result_grid, const GridSpec& search);

enum class Route {
  /// Closed forms where they exist, grid transforms otherwise.
  analytic,
  /// Always go through sampled grids and discrete conjugates.
  grid,
};

/// Potential of (u alpha) box (v beta) with the degenerate weights handled
/// separately.
Flagged<ConvexFunction> asplund_potential(const ConvexFunction& u, const ConvexFunction& v,
                                          double alpha, double beta, const GridSpec& result_grid,
                                          Route route = Route::analytic);

/// alpha.f (+) beta.g = e^{-[(u alpha) box (v beta)]}.
Flagged<LogConcaveFunction> asplund_sum(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                        double alpha, double beta, const GridSpec& result_grid,
                                        Route route = Route::analytic);

/// The family u_t = u box (v t) on a fixed lattice for many t. Conjugates
/// of u and v are computed once on a shared dual lattice; every member is
/// conj(u* + t v*). Presets are sampled onto the result lattice, so every
/// member, including t = 0 (the biconjugate of u), carries the same
/// discretisation.
class AsplundPath {
 public:
  AsplundPath(const ConvexFunction& u, const ConvexFunction& v, GridSpec result_grid,
              std::optional<GridSpec> dual_grid = std::nullopt);

  Flagged<ConvexFunction> at(double t) const;

  const GridSpec& result_grid() const noexcept { return result_grid_; }
  const GridSpec& dual_grid() const noexcept { return dual_grid_; }
  const ConvexFunction& u_conjugate() const noexcept { return u_star_; }
  const ConvexFunction& v_conjugate() const noexcept { return v_star_; }

 private:
  GridSpec result_grid_;
  GridSpec dual_grid_;
  ConvexFunction u_star_;
  ConvexFunction v_star_;
  std::vector<std::string> warnings_;
  // Discrete support functions of dom u and dom v on the unit dual cube;
  // empty when the domain is the whole lattice box.
  std::optional<ConvexFunction> u_domain_;
  std::optional<ConvexFunction> v_domain_;
};

/// h_f = u*; grid forms use the refined transform.
Flagged<ConvexFunction> support_function(const LogConcaveFunction& f, const GridSpec& dual_grid);

struct BijectionReport {
  /// max |grad u*(grad u(x)) - x|.
  double inverse_residual = 0.0;
  /// max |u*(grad u(x)) + u(x) - <x, grad u(x)>|.
  double fenchel_residual = 0.0;
  std::size_t points = 0;
  std::vector<std::string> warnings;
};

/// Residuals of the gradient bijection and the Fenchel equality. Grid
/// forms are conjugated onto dual_grid with central-difference gradients.
/// Throws GradientUnavailable when some point has no gradient.
BijectionReport gradient_bijection_check(const ConvexFunction& u, const std::vector<Vector>& points,
                                         const GridSpec& dual_grid);

/// |central difference in t of u_t(x) + v*(grad u_t(x))| for quadratic u,
/// v with v(0) = 0, using closed forms of u_t.
double asplund_derivative_residual(const ConvexFunction& u, const ConvexFunction& v, double t,
                                   const Vector& x, double dt);

}  // namespace lcq
