#include "lcq/subspace.hpp"

#include <random>

#include <Eigen/QR>

#include "lcq/errors.hpp"

namespace lcq {
namespace {

void check_dims(std::size_t n, std::size_t i) {
  if (n == 0 || i == 0 || i > n)
    throw InvalidArgument("subspace dimension must satisfy 1 <= i <= n (got i=" +
                          std::to_string(i) + ", n=" + std::to_string(n) + ")");
}

// Orthonormal Q with first columns spanning `basis`, sign-normalised so that
// diag(R) > 0. Returns false when `basis` is numerically rank deficient.
bool orthonormal_completion(const Matrix& basis, Matrix& q) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index i = basis.cols();
  Eigen::HouseholderQR<Matrix> qr(basis);
  q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().topRows(i).triangularView<Eigen::Upper>();
  const double scale = std::max(1.0, basis.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < i; ++k) {
    if (std::abs(r(k, k)) < 1e-10 * scale) return false;
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return true;
}

}  // namespace

Subspace::Subspace(Matrix basis, Matrix complement)
    : basis_(std::move(basis)), complement_(std::move(complement)) {
  check_dims(static_cast<std::size_t>(basis_.rows()), static_cast<std::size_t>(basis_.cols()));
  if (complement_.rows() != basis_.rows() || basis_.cols() + complement_.cols() != basis_.rows())
    throw InvalidArgument("Subspace: basis and complement must together be n x n");
  if (orthonormality_residual() > 1e-10)
    throw InvalidArgument("Subspace: [basis complement] is not orthonormal");
}

Subspace Subspace::from_basis(Matrix basis) {
  check_dims(static_cast<std::size_t>(basis.rows()), static_cast<std::size_t>(basis.cols()));
  Matrix q;
  if (!orthonormal_completion(basis, q)) throw InvalidArgument("Subspace: rank-deficient basis");
  const Eigen::Index i = basis.cols();
  return Subspace(std::move(basis), q.rightCols(q.cols() - i));
}

Subspace Subspace::whole_space(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return Subspace(Matrix::Identity(m, m), Matrix(m, 0));
}

bool Subspace::is_identity() const {
  return basis_.rows() == basis_.cols() &&
         (basis_ - Matrix::Identity(basis_.rows(), basis_.cols())).cwiseAbs().maxCoeff() <= 1e-14;
}

bool Subspace::is_axis_aligned() const {
  for (Eigen::Index c = 0; c < basis_.cols(); ++c) {
    Eigen::Index nonzero = 0;
    for (Eigen::Index r = 0; r < basis_.rows(); ++r) {
      const double a = std::abs(basis_(r, c));
      if (a > 1e-14) {
        if (std::abs(a - 1.0) > 1e-14) return false;
        ++nonzero;
      }
    }
    if (nonzero != 1) return false;
  }
  return true;
}

double Subspace::orthonormality_residual() const {
  const Eigen::Index i = basis_.cols();
  const Eigen::Index m = complement_.cols();
  double r = (basis_.transpose() * basis_ - Matrix::Identity(i, i)).cwiseAbs().maxCoeff();
  if (m > 0) {
    r = std::max(r, (complement_.transpose() * complement_ - Matrix::Identity(m, m)).cwiseAbs().maxCoeff());
    r = std::max(r, (basis_.transpose() * complement_).cwiseAbs().maxCoeff());
  }
  return r;
}

Subspace HaarSampler::sample(std::uint64_t index, std::size_t n, std::size_t i) const {
  check_dims(n, i);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal;
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(i);
  for (int attempt = 0; attempt < 16; ++attempt) {
    Matrix g(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = normal(engine);
    Matrix q;
    if (!orthonormal_completion(g, q)) continue;
    return Subspace(q.leftCols(cols), q.rightCols(rows - cols));
  }
  throw Error("haar_sample: repeated rank-deficient draws");
}

Subspace HaarSampler::next(std::size_t n, std::size_t i) { return sample(counter++, n, i); }

Subspace haar_sample(const HaarSampler& sampler, std::size_t n, std::size_t i) {
  return sampler.sample(sampler.counter, n, i);
}

std::vector<Subspace> haar_samples(std::uint64_t seed, std::size_t count, std::size_t n,
                                   std::size_t i) {
  const HaarSampler sampler{seed, 0};
  std::vector<Subspace> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sampler.sample(k, n, i));
  return out;
}

std::vector<Subspace> axis_subspaces(std::size_t n, std::size_t i) {
  check_dims(n, i);
  std::vector<Subspace> out;
  std::vector<std::size_t> pick(i);
  for (std::size_t k = 0; k < i; ++k) pick[k] = k;
  const auto rows = static_cast<Eigen::Index>(n);
  while (true) {
    Matrix b = Matrix::Zero(rows, static_cast<Eigen::Index>(i));
    Matrix c = Matrix::Zero(rows, static_cast<Eigen::Index>(n - i));
    std::size_t bc = 0, cc = 0;
    for (std::size_t axis = 0; axis < n; ++axis) {
      const bool chosen = bc < i && pick[bc] == axis;
      if (chosen) {
        b(static_cast<Eigen::Index>(axis), static_cast<Eigen::Index>(bc++)) = 1.0;
      } else {
        c(static_cast<Eigen::Index>(axis), static_cast<Eigen::Index>(cc++)) = 1.0;
      }
    }
    out.emplace_back(std::move(b), std::move(c));
    // next combination
    std::size_t k = i;
    while (k > 0 && pick[k - 1] == n - i + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t m = k; m < i; ++m) pick[m] = pick[m - 1] + 1;
  }
  return out;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t m = 1; m <= k; ++m) r = r * (n - k + m) / m;
  return r;
}

}  // namespace lcq
