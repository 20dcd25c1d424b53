#include "mvr/numerics.hpp"

#include "mvr/random.hpp"

#include <Eigen/SparseQR>
#include <unsupported/Eigen/FFT>

#ifdef MVR_HAVE_SPQR
#include <SuiteSparseQR.hpp>
#endif

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace mvr {

Matrix leading_left_singular(const Matrix& M, Index max_rank, double rel_cutoff, double abs_floor) {
  if (M.rows() == 0 || M.cols() == 0 || max_rank <= 0) return Matrix(M.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= abs_floor || s(0) == 0.0) return Matrix(M.rows(), 0);
  double thresh = std::max(rel_cutoff * s(0), abs_floor);
  Index r = 0;
  while (r < s.size() && r < max_rank && s(r) > thresh) ++r;
  return svd.matrixU().leftCols(r);
}

Index numerical_rank(const Matrix& M, double cutoff) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  Index r = 0;
  while (r < s.size() && s(r) > cutoff * s(0)) ++r;
  return r;
}

Matrix pinv(const Matrix& M, double cutoff) {
  Matrix out = Matrix::Zero(M.cols(), M.rows());
  if (M.size() == 0) return out;
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s(0) == 0.0) return out;
  for (Index i = 0; i < s.size() && s(i) > cutoff * s(0); ++i)
    out += svd.matrixV().col(i) * (1.0 / s(i)) * svd.matrixU().col(i).transpose();
  return out;
}

namespace {

void require_pow2(Index n) {
  if (!is_power_of_two(n)) throw ConfigError("fft length must be a power of two, got " + std::to_string(n));
}

}  // namespace

ComplexVector fft(const ComplexVector& x) {
  require_pow2(x.size());
  Eigen::FFT<double> engine;
  std::vector<std::complex<double>> in(x.data(), x.data() + x.size()), out;
  engine.fwd(out, in);
  return Eigen::Map<ComplexVector>(out.data(), Index(out.size()));
}

ComplexVector fft(const Vector& x) { return fft(ComplexVector(x.cast<std::complex<double>>())); }

ComplexVector ifft(const ComplexVector& x) {
  require_pow2(x.size());
  Eigen::FFT<double> engine;
  std::vector<std::complex<double>> in(x.data(), x.data() + x.size()), out;
  engine.inv(out, in);
  return Eigen::Map<ComplexVector>(out.data(), Index(out.size()));
}

LsqResult sparse_lsq(Index rows, Index cols, const std::vector<Triplet>& triplets, const Vector& rhs,
                     double rank_tol) {
  SparseMatrix A(rows, cols);
  A.setFromTriplets(triplets.begin(), triplets.end());
  return sparse_lsq(std::move(A), rhs, rank_tol);
}

namespace {

void check_rank(Index rank, Index cols, const Vector& rdiag, double rank_tol) {
  const double rmax = rdiag.size() ? rdiag.cwiseAbs().maxCoeff() : 0.0;
  const double rmin = rdiag.head(std::min<Index>(rank, rdiag.size())).cwiseAbs().minCoeff();
  if (rank < cols || !(rmin > rank_tol * rmax))
    throw UnderDeterminedError("sparse_lsq: system is numerically rank deficient (rank " + std::to_string(rank) +
                               " of " + std::to_string(cols) + "); use more queries");
}

#ifdef MVR_HAVE_SPQR
// Direct SuiteSparseQR call: C = Q^T b is formed during the factorization, so
// the Householder vectors never need to be stored.
Vector spqr_solve(SparseMatrix& A, const Vector& rhs, double rank_tol, Index& rank) {
  const Index rows = A.rows(), cols = A.cols();
  cholmod_common cc;
  cholmod_l_start(&cc);
  cholmod_sparse S{};
  S.nrow = size_t(rows);
  S.ncol = size_t(cols);
  S.nzmax = size_t(A.nonZeros());
  S.p = A.outerIndexPtr();
  S.i = A.innerIndexPtr();
  S.x = A.valuePtr();
  S.stype = 0;
  S.itype = CHOLMOD_LONG;
  S.xtype = CHOLMOD_REAL;
  S.dtype = CHOLMOD_DOUBLE;
  S.sorted = 1;
  S.packed = 1;
  cholmod_dense* B = cholmod_l_allocate_dense(size_t(rows), 1, size_t(rows), CHOLMOD_REAL, &cc);
  std::copy(rhs.data(), rhs.data() + rows, static_cast<double*>(B->x));
  cholmod_dense* C = nullptr;
  cholmod_sparse* R = nullptr;
  SuiteSparse_long* E = nullptr;
  rank = SuiteSparseQR<double>(SPQR_ORDERING_DEFAULT, SPQR_DEFAULT_TOL, cols, 0, &S, nullptr, B, nullptr, &C, &R, &E,
                               nullptr, nullptr, nullptr, &cc);
  cholmod_l_free_dense(&B, &cc);
  auto release = [&] {
    cholmod_l_free_dense(&C, &cc);
    cholmod_l_free_sparse(&R, &cc);
    if (E) cholmod_l_free(size_t(cols), sizeof(SuiteSparse_long), E, &cc);
    cholmod_l_finish(&cc);
  };
  if (rank < 0 || !R || !C) {
    release();
    throw UnderDeterminedError("sparse_lsq: factorization failed");
  }
  Eigen::Map<const SparseMatrix> Rm(Index(R->nrow), Index(R->ncol), Index(R->nzmax),
                                    static_cast<const Index*>(R->p), static_cast<const Index*>(R->i),
                                    static_cast<const double*>(R->x));
  Vector rdiag = Vector(SparseMatrix(Rm.topLeftCorner(std::min<Index>(Rm.rows(), cols), cols)).diagonal());
  try {
    check_rank(rank, cols, rdiag, rank_tol);
  } catch (...) {
    release();
    throw;
  }
  Vector c = Eigen::Map<const Vector>(static_cast<const double*>(C->x), cols);
  Vector y = Rm.topLeftCorner(cols, cols).triangularView<Eigen::Upper>().solve(c);
  Vector x(cols);
  for (Index j = 0; j < cols; ++j) x(E ? Index(E[j]) : j) = y(j);
  release();
  return x;
}
#endif

}  // namespace

LsqResult sparse_lsq(SparseMatrix A, const Vector& rhs, double rank_tol) {
  const Index rows = A.rows(), cols = A.cols();
  if (rhs.size() != rows) throw ShapeError("sparse_lsq: rhs length does not match row count");
  if (rows < cols) throw UnderDeterminedError("sparse_lsq: fewer equations than unknowns");
  LsqResult res;
  res.x = Vector::Zero(cols);
  if (cols == 0) {
    res.residual = rhs.norm();
    return res;
  }
  A.makeCompressed();

  // Column equilibration in place; an empty column is a structural rank deficiency.
  Vector scale(cols);
  for (Index j = 0; j < cols; ++j) {
    double nrm = 0.0;
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) nrm += it.value() * it.value();
    if (nrm == 0.0) throw UnderDeterminedError("sparse_lsq: unknown " + std::to_string(j) + " appears in no equation");
    scale(j) = 1.0 / std::sqrt(nrm);
    for (SparseMatrix::InnerIterator it(A, j); it; ++it) it.valueRef() *= scale(j);
  }

  Vector y;
#ifdef MVR_HAVE_SPQR
  y = spqr_solve(A, rhs, rank_tol, res.rank);
#else
  Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<Index>> qr;
  qr.compute(A);
  if (qr.info() != Eigen::Success) throw UnderDeterminedError("sparse_lsq: factorization failed");
  res.rank = qr.rank();
  check_rank(res.rank, cols, Vector(qr.matrixR().diagonal()), rank_tol);
  y = qr.solve(rhs);
#endif
  res.residual = (A * y - rhs).norm();
  res.x = scale.asDiagonal() * y;
  return res;
}

LinearMap difference(const LinearMap& a, const LinearMap& b) {
  LinearMap d;
  d.n = a.n;
  d.apply = [a, b](const Matrix& X) -> Matrix { return a.apply(X) - b.apply(X); };
  d.apply_transpose = [a, b](const Matrix& X) -> Matrix { return a.apply_transpose(X) - b.apply_transpose(X); };
  return d;
}

double spectral_norm_estimate(const LinearMap& op, int iters, std::uint64_t seed) {
  GaussianStream g(seed, streams::power);
  Vector x = g.vector(op.n);
  x.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector y = op.apply(x).col(0);
    sigma = y.norm();
    if (sigma == 0.0) return 0.0;
    Vector z = op.apply_transpose(y).col(0);
    double zn = z.norm();
    if (zn == 0.0) return 0.0;
    x = z / zn;
  }
  return op.apply(x).col(0).norm();
}

double spectral_relative_error(const LinearMap& diff, const LinearMap& reference, int iters, std::uint64_t seed) {
  double num = spectral_norm_estimate(diff, iters, seed);
  if (num == 0.0) return 0.0;
  double den = spectral_norm_estimate(reference, iters, seed);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

Matrix sylvester_solve(const Matrix& P, const Matrix& Q, const Matrix& R) {
  if (P.rows() != P.cols() || Q.rows() != Q.cols() || R.rows() != P.rows() || R.cols() != Q.rows())
    throw ShapeError("sylvester_solve: incompatible shapes");
  using CMatrix = Eigen::MatrixXcd;
  const Index m = P.rows(), n = Q.rows();
  if (m == 0 || n == 0) return Matrix::Zero(m, n);
  Eigen::ComplexSchur<CMatrix> sp(P.cast<std::complex<double>>());
  Eigen::ComplexSchur<CMatrix> sq(Q.cast<std::complex<double>>());
  const CMatrix& T = sp.matrixT();
  const CMatrix& S = sq.matrixT();
  const CMatrix& U = sp.matrixU();
  const CMatrix& V = sq.matrixU();

  double scale = std::max({1.0, T.diagonal().cwiseAbs().maxCoeff(), S.diagonal().cwiseAbs().maxCoeff()});
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(T(i, i) - S(j, j)) <= 1e-10 * scale)
        throw SingularPencilError("sylvester_solve: spectra of P and Q intersect");

  CMatrix F = U.adjoint() * R.cast<std::complex<double>>() * V;
  CMatrix Y(m, n);
  for (Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = F.col(j);
    if (j > 0) rhs += Y.leftCols(j) * S.col(j).head(j);
    CMatrix shifted = T;
    shifted.diagonal().array() -= S(j, j);
    Y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (U * Y * V.adjoint()).real();
}

Matrix shift_apply(double t, const Matrix& X) {
  const Index n = X.rows();
  Matrix Y(n, X.cols());
  if (n == 0) return Y;
  Y.row(0) = t * X.row(n - 1);
  Y.bottomRows(n - 1) = X.topRows(n - 1);
  return Y;
}

Matrix shift_transpose_apply(double t, const Matrix& X) {
  const Index n = X.rows();
  Matrix Y(n, X.cols());
  if (n == 0) return Y;
  Y.topRows(n - 1) = X.bottomRows(n - 1);
  Y.row(n - 1) = t * X.row(0);
  return Y;
}

Matrix shift_matrix(Index n, double t) { return shift_apply(t, Matrix::Identity(n, n)); }

}  // namespace mvr
