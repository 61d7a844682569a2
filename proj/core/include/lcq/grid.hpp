#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lcq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One axis of a Cartesian lattice: `count` equispaced nodes from lo to hi.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 2;

  double spacing() const { return (hi - lo) / static_cast<double>(count - 1); }
  /// k-th node; the last node is exactly `hi`.
  double node(std::size_t k) const {
    return k + 1 == count ? hi : lo + spacing() * static_cast<double>(k);
  }

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Axis-aligned evaluation lattice shared by every quadrature and discrete
/// transform. Nodes are stored row-major: the last axis varies fastest.
class GridSpec {
 public:
  /// Largest supported node count; larger lattices are rejected up front.
  static constexpr std::size_t kMaxNodes = std::size_t{1} << 31;

  explicit GridSpec(std::vector<Axis> axes);

  static GridSpec cube(std::size_t dim, double half_width, std::size_t count);

  std::size_t dim() const noexcept { return axes_.size(); }
  const Axis& axis(std::size_t k) const { return axes_.at(k); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }

  std::size_t size() const noexcept { return size_; }
  std::size_t count(std::size_t k) const { return axes_[k].count; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }
  double spacing(std::size_t k) const { return axes_[k].spacing(); }
  double max_spacing() const;
  double min_spacing() const;
  double cell_volume() const;

  /// Multi-index of a flat node index.
  void unflatten(std::size_t flat, std::span<std::size_t> index) const;
  std::size_t flatten(std::span<const std::size_t> index) const;

  Vector point(std::size_t flat) const;
  /// Writes the coordinates of node `flat` into `out` (size dim()).
  void point(std::size_t flat, std::span<double> out) const;

  /// True if x lies in the closed box, allowing `slack` relative to the
  /// spacing on every axis.
  bool contains(const Vector& x, double slack = 1e-9) const;

  /// Node on the outer shell of the lattice (some index is 0 or count-1).
  bool on_boundary(std::size_t flat) const;

  /// Product trapezoid weights, one per node; they sum to the box volume.
  std::vector<double> trapezoid_weights() const;

  GridSpec translated(const Vector& offset) const;
  GridSpec scaled(double factor) const;

  std::string describe() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

}  // namespace lcq
