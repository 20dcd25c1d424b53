// Independent reference computations and generators for the test suites.
// Nothing here calls into the library's numerical kernels.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ref {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Hand-rolled generator for property tests, separate from the library RNG.
struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed * 0x9e3779b97f4a7c15ULL + 7) {}
  double normal() { return std::normal_distribution<double>()(eng); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(eng); }
  Matrix matrix(Index r, Index c) {
    Matrix M(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) M(i, j) = normal();
    return M;
  }
  Vector vector(Index n) { return matrix(n, 1).col(0); }
  Matrix symmetric(Index n) {
    Matrix M = matrix(n, n);
    return (M + M.transpose()) / 2;
  }
  Matrix orthonormal(Index r, Index c) {
    Eigen::HouseholderQR<Matrix> qr(matrix(r, c));
    return qr.householderQ() * Matrix::Identity(r, c);
  }
};

inline Matrix triple_loop(const Matrix& A, const Matrix& X) {
  Matrix Y = Matrix::Zero(A.rows(), X.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j) {
      long double s = 0;
      for (Index l = 0; l < A.cols(); ++l) s += (long double)A(i, l) * X(l, j);
      Y(i, j) = double(s);
    }
  return Y;
}

// Jacobi for small inputs, divide and conquer above that.
inline Vector singular_values(const Matrix& M) {
  if (std::min(M.rows(), M.cols()) <= 64) return Eigen::JacobiSVD<Matrix>(M).singularValues();
  return Eigen::BDCSVD<Matrix>(M).singularValues();
}

inline double norm2(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return singular_values(M)(0);
}

inline double rel_spectral(const Matrix& A, const Matrix& B) {
  const double d = norm2(A);
  return d == 0 ? norm2(A - B) : norm2(A - B) / d;
}

inline double rel_fro(const Matrix& A, const Matrix& B) {
  const double d = A.norm();
  return d == 0 ? (A - B).norm() : (A - B).norm() / d;
}

// sigma_{k+1} / sigma_1 (0 for zero matrices).
inline double tail_ratio(const Matrix& M, Index k) {
  Vector s = singular_values(M);
  if (s.size() <= k || s(0) == 0) return 0.0;
  return s(k) / s(0);
}

// Minimum-norm least squares through a complete orthogonal decomposition.
inline Vector dense_lsq(const Matrix& A, const Vector& b) { return A.completeOrthogonalDecomposition().solve(b); }

inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

// P X - X Q = R through the vectorized Kronecker system.
inline Matrix kron_sylvester(const Matrix& P, const Matrix& Q, const Matrix& R) {
  const Index m = P.rows(), n = Q.rows();
  Matrix K = kron(Matrix::Identity(n, n), P) - kron(Q.transpose(), Matrix::Identity(m, m));
  Vector r = Eigen::Map<const Vector>(R.data(), R.size());
  Vector x = K.fullPivLu().solve(r);
  return Eigen::Map<const Matrix>(x.data(), m, n);
}

// Cyclic shift with corner t.
inline Matrix shift(Index n, double t) {
  Matrix Z = Matrix::Zero(n, n);
  for (Index i = 1; i < n; ++i) Z(i, i - 1) = 1;
  Z(0, n - 1) = t;
  return Z;
}

inline Index ilog2(Index n) {
  Index l = 0;
  while ((Index(1) << l) < n) ++l;
  return l;
}

// Free parameters of a generic HSS matrix counted term by term:
// top factors, couplings of every internal node, dense leaves.
inline Index hss_count(Index N, Index k, bool symmetric) {
  Index ell = 0;
  while ((Index(1) << ell) <= k) ++ell;
  Index leaf = std::min(Index(1) << ell, N / 2);
  Index internal_per_half = 0;
  for (Index size = N / 2; size > leaf; size /= 2) internal_per_half += (N / 2) / size;
  if (symmetric) return 2 * k * (N / 2) + 2 * internal_per_half * k * k + (N / leaf) * leaf * (leaf + 1) / 2;
  return 4 * k * (N / 2) + 4 * internal_per_half * k * k + (N / leaf) * leaf * leaf;
}

}  // namespace ref
