#pragma once

#include "mvr/types.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <vector>

namespace mvr {

// Orthonormal basis of col(M): left singular vectors whose singular value
// exceeds cutoff * sigma_1. A zero matrix gives an empty (rows x 0) basis.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> orth(
    const Eigen::MatrixBase<Derived>& M, typename Derived::RealScalar cutoff = 1e-12) {
  using Scalar = typename Derived::Scalar;
  using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (M.cols() == 0 || M.rows() == 0) return Result(M.rows(), 0);
  Eigen::BDCSVD<Result> svd(M.eval(), Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Index r = 0;
  if (s.size() > 0 && s(0) > 0)
    while (r < s.size() && s(r) > cutoff * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

// Leading left singular vectors of M, at most max_rank of them, keeping only
// singular values above max(rel_cutoff * sigma_1, abs_floor).
Matrix leading_left_singular(const Matrix& M, Index max_rank, double rel_cutoff = 1e-12,
                             double abs_floor = 0.0);

// Numerical rank with the same cutoff convention as orth.
Index numerical_rank(const Matrix& M, double cutoff = 1e-12);

// Moore-Penrose pseudoinverse through the SVD with relative cutoff.
Matrix pinv(const Matrix& M, double cutoff = 1e-12);

// Unnormalized forward DFT and normalized inverse. Length must be a power of two.
ComplexVector fft(const ComplexVector& x);
ComplexVector fft(const Vector& x);
ComplexVector ifft(const ComplexVector& x);

using Triplet = Eigen::Triplet<double, Index>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;

struct LsqResult {
  Vector x;
  double residual = 0.0;
  Index rank = 0;
};

// Least squares through a sparse orthogonal factorization with a
// fill-reducing column ordering. Throws UnderDeterminedError when the
// factor reveals rank deficiency (|r_min| <= rank_tol * |r_max|).
LsqResult sparse_lsq(Index rows, Index cols, const std::vector<Triplet>& triplets, const Vector& rhs,
                     double rank_tol = 1e-10);
// Same, consuming a compressed matrix (scaled in place, Householder vectors discarded).
LsqResult sparse_lsq(SparseMatrix A, const Vector& rhs, double rank_tol = 1e-10);

// Batched linear map with its transpose.
struct LinearMap {
  Index n = 0;
  std::function<Matrix(const Matrix&)> apply;
  std::function<Matrix(const Matrix&)> apply_transpose;
};

LinearMap difference(const LinearMap& a, const LinearMap& b);

// Power method on the Gram operator from a seeded Gaussian start.
double spectral_norm_estimate(const LinearMap& op, int iters = 20, std::uint64_t seed = 0);

// ||A - B||_2 / ||A||_2 with both norms estimated by the power method.
double spectral_relative_error(const LinearMap& diff, const LinearMap& reference, int iters = 20,
                               std::uint64_t seed = 0);

// Bartels-Stewart: solves P X - X Q = R through complex Schur forms.
Matrix sylvester_solve(const Matrix& P, const Matrix& Q, const Matrix& R);

// Cyclic shift Z_t: (Z_t x)_0 = t x_{N-1}, (Z_t x)_i = x_{i-1}.
Matrix shift_apply(double t, const Matrix& X);
Matrix shift_transpose_apply(double t, const Matrix& X);
Matrix shift_matrix(Index n, double t);

}  // namespace mvr
