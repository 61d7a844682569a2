#pragma once

#include <cstdint>
#include <vector>

#include "lcq/grid.hpp"

namespace lcq {

/// An i-dimensional linear subspace of R^n with an orthonormal basis B
/// (n x i) and an orthonormal basis C (n x (n-i)) of its complement.
class Subspace {
 public:
  /// Validates orthonormality of [B C] to 1e-10.
  Subspace(Matrix basis, Matrix complement);
  /// Completes `basis` (orthonormal columns) with a complement.
  static Subspace from_basis(Matrix basis);
  static Subspace whole_space(std::size_t n);

  std::size_t ambient_dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }
  std::size_t sub_dim() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  const Matrix& basis() const noexcept { return basis_; }
  const Matrix& complement() const noexcept { return complement_; }
  /// B is the n x n identity.
  bool is_identity() const;
  /// Every basis vector is a signed standard basis vector.
  bool is_axis_aligned() const;

  /// max of |B'B - I|, |C'C - I|, |B'C| entries.
  double orthonormality_residual() const;

 private:
  Matrix basis_;
  Matrix complement_;
};

/// Counter-based Haar sampler on the Grassmannian G(i, n). Sample k depends
/// only on (seed, k), so draws can be evaluated in any order or in parallel.
struct HaarSampler {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;

  Subspace sample(std::uint64_t index, std::size_t n, std::size_t i) const;
  /// sample(counter++).
  Subspace next(std::size_t n, std::size_t i);
};

/// Sample at the sampler's current counter (the sampler is not advanced).
Subspace haar_sample(const HaarSampler& sampler, std::size_t n, std::size_t i);

/// Samples 0..count-1 of the given seed.
std::vector<Subspace> haar_samples(std::uint64_t seed, std::size_t count, std::size_t n,
                                   std::size_t i);

/// The C(n, i) coordinate subspaces in lexicographic order of their axes.
std::vector<Subspace> axis_subspaces(std::size_t n, std::size_t i);

std::uint64_t binomial(std::size_t n, std::size_t k);

}  // namespace lcq
