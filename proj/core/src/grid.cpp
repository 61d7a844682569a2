#include "lcq/grid.hpp"

#include <cmath>
#include <sstream>

#include "lcq/errors.hpp"

namespace lcq {

GridSpec::GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InvalidArgument("GridSpec: dimension must be positive");
  strides_.assign(axes_.size(), 1);
  std::size_t total = 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    const Axis& a = axes_[k];
    if (!(std::isfinite(a.lo) && std::isfinite(a.hi) && a.lo < a.hi))
      throw InvalidArgument("GridSpec: axis " + std::to_string(k) + " needs lo < hi");
    if (a.count < 2)
      throw InvalidArgument("GridSpec: axis " + std::to_string(k) + " needs count >= 2");
    strides_[k] = total;
    if (total > kMaxNodes / a.count) throw InvalidArgument("GridSpec: too many nodes");
    total *= a.count;
  }
  size_ = total;
}

GridSpec GridSpec::cube(std::size_t dim, double half_width, std::size_t count) {
  return GridSpec(std::vector<Axis>(dim, Axis{-half_width, half_width, count}));
}

double GridSpec::max_spacing() const {
  double h = 0.0;
  for (const auto& a : axes_) h = std::max(h, a.spacing());
  return h;
}

double GridSpec::min_spacing() const {
  double h = axes_.front().spacing();
  for (const auto& a : axes_) h = std::min(h, a.spacing());
  return h;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.spacing();
  return v;
}

void GridSpec::unflatten(std::size_t flat, std::span<std::size_t> index) const {
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    index[k] = flat / strides_[k];
    flat -= index[k] * strides_[k];
  }
}

std::size_t GridSpec::flatten(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) flat += index[k] * strides_[k];
  return flat;
}

Vector GridSpec::point(std::size_t flat) const {
  Vector x(static_cast<Eigen::Index>(dim()));
  point(flat, std::span<double>(x.data(), dim()));
  return x;
}

void GridSpec::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const std::size_t i = flat / strides_[k];
    flat -= i * strides_[k];
    out[k] = axes_[k].node(i);
  }
}

bool GridSpec::contains(const Vector& x, double slack) const {
  if (static_cast<std::size_t>(x.size()) != dim()) return false;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const double tol = slack * axes_[k].spacing();
    if (x[static_cast<Eigen::Index>(k)] < axes_[k].lo - tol ||
        x[static_cast<Eigen::Index>(k)] > axes_[k].hi + tol)
      return false;
  }
  return true;
}

bool GridSpec::on_boundary(std::size_t flat) const {
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const std::size_t i = flat / strides_[k];
    flat -= i * strides_[k];
    if (i == 0 || i + 1 == axes_[k].count) return true;
  }
  return false;
}

std::vector<double> GridSpec::trapezoid_weights() const {
  std::vector<double> w(size_, 1.0);
  std::vector<std::size_t> idx(dim());
  for (std::size_t flat = 0; flat < size_; ++flat) {
    unflatten(flat, idx);
    double weight = 1.0;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      const double h = axes_[k].spacing();
      weight *= (idx[k] == 0 || idx[k] + 1 == axes_[k].count) ? 0.5 * h : h;
    }
    w[flat] = weight;
  }
  return w;
}

GridSpec GridSpec::translated(const Vector& offset) const {
  if (static_cast<std::size_t>(offset.size()) != dim())
    throw DimensionMismatch("GridSpec::translated", dim(), static_cast<std::size_t>(offset.size()));
  std::vector<Axis> axes = axes_;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    axes[k].lo += offset[static_cast<Eigen::Index>(k)];
    axes[k].hi += offset[static_cast<Eigen::Index>(k)];
  }
  return GridSpec(std::move(axes));
}

GridSpec GridSpec::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("GridSpec::scaled: factor must be positive");
  std::vector<Axis> axes = axes_;
  for (auto& a : axes) {
    a.lo *= factor;
    a.hi *= factor;
  }
  return GridSpec(std::move(axes));
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (k) os << " x ";
    os << '[' << axes_[k].lo << ',' << axes_[k].hi << "]#" << axes_[k].count;
  }
  return os.str();
}

}  // namespace lcq
