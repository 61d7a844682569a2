#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lcq/grid.hpp"

namespace lcq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// u(x) = 1/2 x'Qx + b'x + c, Q symmetric positive definite.
struct Quadratic {
  Matrix Q;
  Vector b;
  double c = 0.0;
};

/// Indicator of the centred ball of radius `radius` plus a constant.
/// radius == 0 is the indicator of the origin.
struct IndicatorBall {
  std::size_t dim = 1;
  double radius = 1.0;
  double offset = 0.0;
};

/// Indicator of the centred box with the given half-widths plus a constant.
struct IndicatorBox {
  Vector halfwidths;
  double offset = 0.0;
};

/// a * |x| + offset.
struct NormMultiple {
  std::size_t dim = 1;
  double a = 1.0;
  double offset = 0.0;
};

/// sum_k w_k |x_k| + offset, i.e. the support function of a centred box.
struct WeightedL1 {
  Vector weights;
  double offset = 0.0;
};

/// Node samples of u on a lattice. finite[k] == 0 marks u = +inf at node k;
/// the value stored there is +inf and never read.
struct GridSamples {
  GridSpec grid;
  std::vector<double> values;
  std::vector<std::uint8_t> finite;
};

enum class GridCheck { convexity, none };

/// Proper convex function on R^n, either an analytic preset or grid samples.
/// Immutable; grid payloads are shared between copies.
class ConvexFunction {
 public:
  using Form = std::variant<Quadratic, IndicatorBall, IndicatorBox, NormMultiple, WeightedL1,
                            std::shared_ptr<const GridSamples>>;

  static ConvexFunction quadratic(Matrix Q, Vector b, double c = 0.0);
  /// 1/2 |x|^2.
  static ConvexFunction half_squared_norm(std::size_t dim);
  static ConvexFunction indicator_ball(std::size_t dim, double radius, double offset = 0.0);
  /// I_{0}.
  static ConvexFunction point_indicator(std::size_t dim);
  static ConvexFunction indicator_box(Vector halfwidths, double offset = 0.0);
  static ConvexFunction norm_multiple(std::size_t dim, double a, double offset = 0.0);
  static ConvexFunction weighted_l1(Vector weights, double offset = 0.0);
  /// Grid form. Masked nodes are those with finite[k] == 0. Throws
  /// ConvexityViolation when `check` is on and an axis line is not
  /// discretely convex, ImproperFunction when every node is masked.
  static ConvexFunction from_grid(GridSpec grid, std::vector<double> values,
                                  std::vector<std::uint8_t> finite,
                                  GridCheck check = GridCheck::convexity);

  std::size_t dim() const noexcept { return dim_; }
  const Form& form() const noexcept { return form_; }
  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&form_);
  }
  bool is_grid() const noexcept;
  /// Grid payload; throws InvalidArgument for presets.
  const GridSamples& samples() const;
  std::string_view kind() const noexcept;
  /// Twice differentiable with positive definite Hessian (quadratic presets).
  bool is_smooth() const noexcept;

 private:
  ConvexFunction(Form form, std::size_t dim) : form_(std::move(form)), dim_(dim) {}

  Form form_;
  std::size_t dim_;
};

struct EvalResult {
  double value = kInf;
  /// Present for smooth presets and for grid forms at points whose central
  /// difference stencil stays inside the box on finite nodes.
  std::optional<Vector> gradient;

  bool finite() const { return std::isfinite(value); }
};

/// u(x) with gradient where available. Throws DimensionMismatch, and
/// OutOfDomain for grid forms when x leaves the box.
EvalResult evaluate(const ConvexFunction& u, const Vector& x);

/// u(x) without gradient; grid forms return +inf outside their box. Grid
/// values are multilinear interpolants; a masked corner with non-zero
/// weight yields +inf.
double value_or_inf(const ConvexFunction& u, std::span<const double> x);

/// Grid form with node values u(node). Throws ConvexityViolation when the
/// samples are not discretely convex along every axis.
ConvexFunction sample_to_grid(const ConvexFunction& u, const GridSpec& grid);

/// Per-axis discrete convexity: finite nodes along each lattice line form a
/// contiguous run with nondecreasing first differences.
bool is_discretely_convex(const GridSamples& samples, double rel_tol = 1e-9);

enum class Tristate { yes, no, undetermined };

struct ClassReport {
  bool proper = false;
  bool convex = false;
  bool coercive = false;
  /// Fitted lower bound u(x) >= slope*|x| + intercept (slope may be +inf for
  /// bounded domains).
  double slope = 0.0;
  double intercept = 0.0;
  Tristate superlinear = Tristate::undetermined;
};

/// Diagnostic membership test for the classes L and L'.
ClassReport validate_class(const ConvexFunction& u);

ConvexFunction add_constant(const ConvexFunction& u, double constant);
/// lambda * u, i.e. f^lambda for f = e^{-u}. lambda > 0.
ConvexFunction scale_values(const ConvexFunction& u, double lambda);
/// x -> u(x - shift). Supported for quadratics and grids (other presets are
/// centred and accept only a zero shift).
ConvexFunction translate(const ConvexFunction& u, const Vector& shift);
/// A minimiser of u; lowest node index for grids.
Vector minimizer(const ConvexFunction& u);
double infimum(const ConvexFunction& u);

/// f = e^{-u}, extended by 0 where u = +inf.
class LogConcaveFunction {
 public:
  explicit LogConcaveFunction(ConvexFunction potential) : u_(std::move(potential)) {}

  /// e^{-|x|^2/2}.
  static LogConcaveFunction gaussian(std::size_t dim);
  static LogConcaveFunction characteristic_ball(std::size_t dim, double radius);
  static LogConcaveFunction characteristic_box(Vector halfwidths);

  const ConvexFunction& potential() const noexcept { return u_; }
  std::size_t dim() const noexcept { return u_.dim(); }
  double operator()(const Vector& x) const;

  /// Working box holding all but about `tail_tolerance` of the mass. Grid
  /// forms return their own lattice.
  GridSpec suggested_box(std::size_t count, double tail_tolerance = 1e-8) const;

 private:
  ConvexFunction u_;
};

}  // namespace lcq
