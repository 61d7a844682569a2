#pragma once

#include <optional>

#include "lcq/convex_function.hpp"
#include "lcq/flagged.hpp"
#include "lcq/subspace.hpp"

namespace lcq {

/// Lattice on a subspace (or its complement) with coordinates w.r.t.
/// `frame` (n x m orthonormal): a cube centred at frame' * centre(ambient)
/// whose half-width is the largest ambient half-width, so the image of the
/// ambient box is covered. `count` nodes per axis (0: largest ambient count).
GridSpec subspace_grid(const GridSpec& ambient, const Matrix& frame, std::size_t count = 0);

struct ProjectionOptions {
  /// Use closed forms for presets (quadratic, ball, norm; box and weighted
  /// l1 on coordinate subspaces).
  bool analytic = true;
  /// Golden-section sweeps per fiber axis after the lattice search.
  int refine_sweeps = 2;
};

/// Potential of f|xi: (u|xi)(x) = min_z u(Bx + Cz), x in R^i.
/// Closed forms are returned for presets when allowed. Otherwise each
/// target node takes the minimum over the fiber lattice (coordinates z
/// w.r.t. C) followed by golden-section refinement, giving a grid form on
/// `target`. fiber may be omitted only when i = n. Warns when an interior
/// target node attains its minimum on the fiber box boundary.
Flagged<ConvexFunction> project_potential(const ConvexFunction& u, const Subspace& xi,
                                          const GridSpec& target,
                                          const std::optional<GridSpec>& fiber,
                                          ProjectionOptions options = {});

Flagged<LogConcaveFunction> project(const LogConcaveFunction& f, const Subspace& xi,
                                    const std::optional<GridSpec>& fiber, const GridSpec& target,
                                    ProjectionOptions options = {});

struct ProjectionReport {
  /// sup over target nodes of |(a.f (+) b.g)|xi - (a.f|xi (+) b.g|xi)| on
  /// function values.
  double structure_residual = 0.0;
  /// Target nodes where f|xi > g|xi (beyond 1e-12).
  std::size_t order_violations = 0;
  /// Whether f <= g held on the ambient nodes.
  bool ordered_input = false;
  double target_spacing = 0.0;
  std::vector<std::string> warnings;
};

/// Numerical check that projection commutes with the Asplund sum and
/// preserves order. Every operation runs through lattices (no closed forms).
ProjectionReport project_properties_check(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                          const Subspace& xi, double alpha, double beta,
                                          const GridSpec& ambient, const GridSpec& target,
                                          const GridSpec& fiber);

/// |central difference in t of (u_t|xi)(x) + v*(B grad(u_t|xi)(x))| for
/// quadratic u, v, using closed forms.
double projection_derivative_residual(const ConvexFunction& u, const ConvexFunction& v,
                                      const Subspace& xi, double t, const Vector& x, double dt);

}  // namespace lcq
