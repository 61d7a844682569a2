#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcq/convex_function.hpp"
#include "lcq/legendre.hpp"
#include "lcq/projection.hpp"
#include "lcq/subspace.hpp"

namespace lcq {

/// Volume of the k-dimensional unit ball.
double omega(std::size_t k);
/// omega(0..n_max).
std::vector<double> omega_table(std::size_t n_max);

enum class Method { closed_form, quadrature, fd, representation };
enum class SubspaceMode { axis, mc };
enum class MassRule {
  /// Closed-form integrals for presets, trapezoid quadrature otherwise.
  automatic,
  /// Trapezoid quadrature everywhere.
  quadrature,
};

std::string_view to_string(Method m);
std::string_view to_string(SubspaceMode m);
std::string_view to_string(MassRule m);
std::string_view to_string(Route r);

struct EngineConfig {
  SubspaceMode mode = SubspaceMode::axis;
  std::size_t samples = 256;
  std::uint64_t seed = 0;
  /// Working box in R^n. Default: the function's suggested box with
  /// `count` nodes per axis.
  std::optional<GridSpec> ambient;
  std::size_t count = 65;
  /// Nodes per axis on subspace and fiber lattices; 0 uses the ambient count.
  std::size_t subspace_count = 0;
  MassRule mass_rule = MassRule::automatic;
  /// Largest admissible share of the mass carried by boundary nodes.
  double tail_tolerance = 1e-6;
  std::vector<double> t_steps{0.08, 0.04, 0.02};
  /// Relative change of the extrapolated slope when the largest step is
  /// dropped, above which a first-variation result is flagged.
  double extrapolation_budget = 0.02;
  /// How f (+) t.g is formed in the first-variation path.
  Route route = Route::grid;
  ProjectionOptions projection;
};

/// Everything needed to rerun a computation.
struct Provenance {
  std::string mode;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string ambient;
  std::vector<double> t_steps;
  std::string mass_rule;
  std::string route;
};

struct QuermassResult {
  double value = 0.0;
  /// Monte Carlo standard error over subspaces; 0 for exact and axis modes.
  double std_error = 0.0;
  Method method = Method::quadrature;
  Provenance config;
  /// fd: relative extrapolation change; otherwise 0.
  double residual = 0.0;
  std::size_t subspaces = 0;
  std::vector<std::string> warnings;
};

/// Closed-form integral of e^{-w} for presets; empty for grid forms.
std::optional<double> closed_form_mass(const ConvexFunction& w);

/// J(f) = int f. Closed form for presets under MassRule::automatic,
/// trapezoid quadrature on `grid` otherwise (grid forms use their own
/// lattice). Throws TailMassExceeded when boundary nodes carry more than
/// the tail tolerance.
QuermassResult total_mass(const LogConcaveFunction& f, const GridSpec& grid,
                          const EngineConfig& config = {});

/// J_i(f) = int over xi of f|xi, i = xi.sub_dim().
QuermassResult i_total_mass(const LogConcaveFunction& f, const Subspace& xi,
                            const EngineConfig& config = {});
/// J_0(f) := omega_n.
QuermassResult zeroth_total_mass(const LogConcaveFunction& f);

/// W_j(f) = (omega_n / omega_i) E[J_i(f)], i = n - j, 0 <= j <= n - 1.
QuermassResult quermassintegral(const LogConcaveFunction& f, std::size_t j,
                                const EngineConfig& config = {});

/// g translated so that its potential attains its minimum at the origin
/// (quadratic and grid forms; other presets are already centred).
ConvexFunction reduce_translation(const ConvexFunction& v);

/// W_j(f, g) = (1/(n-j)) d/dt W_j(f (+) t.g) at 0+, from one-sided
/// differences at config.t_steps with polynomial extrapolation to t = 0.
/// The same subspaces are used for every t.
QuermassResult mixed_quermass_fd(const LogConcaveFunction& f, const LogConcaveFunction& g,
                                 std::size_t j, const EngineConfig& config = {});

/// W_j(f, g) = (1/(n-j)) (omega_n / omega_i) E[ int_xi h_g(B grad(u|xi)(x)) f|xi(x) dx ],
/// i = n - j. Needs gradients of u|xi (quadratic presets or grid forms).
QuermassResult mixed_quermass_representation(const LogConcaveFunction& f,
                                             const LogConcaveFunction& g, std::size_t j,
                                             const EngineConfig& config = {});

struct BlaschkePetkantschinReport {
  double lhs = 0.0;
  /// (n omega_n)/(i omega_i) E[ int_xi f(Bx) |x|^{n-i} dx ].
  double rhs = 0.0;
  /// Same average with the factor omega_n / omega_i.
  double rhs_alt_constant = 0.0;
  double std_error = 0.0;
  double relative_gap = 0.0;
  double budget = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
};

/// Both sides by independent trapezoid quadrature. Subspace lattices use
/// odd node counts shifted by half a cell so no node sits at the origin.
BlaschkePetkantschinReport blaschke_petkantschin_check(const LogConcaveFunction& f, std::size_t i,
                                                       const EngineConfig& config = {},
                                                       double quadrature_budget = 0.01);

struct ExistenceBoundReport {
  /// inf of the reduced potential of g, i.e. -log g(0) after reduction.
  double d = 0.0;
  double w_j = 0.0;
  double bound = 0.0;
  QuermassResult mixed;
  double tolerance = 0.0;
  bool satisfied = false;
  /// Within tolerance of the bound.
  bool marginal = false;
};

/// mixed_quermass_fd(f, g, j) >= -max(d, 0) W_j(f) / (n - j).
ExistenceBoundReport existence_bound_check(const LogConcaveFunction& f,
                                           const LogConcaveFunction& g, std::size_t j,
                                           const EngineConfig& config = {});

struct PrekopaLeindlerReport {
  double lhs = 0.0;  ///< J(lambda.f (+) (1-lambda).g)
  double rhs = 0.0;  ///< J(f)^lambda J(g)^(1-lambda)
  double relative_gap = 0.0;
  std::vector<std::string> warnings;
};

PrekopaLeindlerReport prekopa_leindler_check(const LogConcaveFunction& f,
                                             const LogConcaveFunction& g, double lambda,
                                             const EngineConfig& config = {});

struct HomogeneityReport {
  double lhs = 0.0;  ///< W_j(lambda.f), lambda.f = f(x/lambda)^lambda
  double rhs = 0.0;  ///< lambda^(n-j) W_j(f^lambda)
  double relative_gap = 0.0;
};

HomogeneityReport homogeneity_check(const LogConcaveFunction& f, std::size_t j, double lambda,
                                    const EngineConfig& config = {});

}  // namespace lcq
