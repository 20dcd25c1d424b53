#include "mvr/lowrank.hpp"

#include "mvr/numerics.hpp"

#include <algorithm>

namespace mvr {

namespace {

constexpr double kRankCutoff = 1e-12;

// Orthonormal basis of col(M)^perp (M may have zero columns).
Matrix complement(const Matrix& M) {
  const Index n = M.rows();
  if (M.cols() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
  Index r = numerical_rank(M, kRankCutoff);
  return svd.matrixU().rightCols(n - r);
}

// Right singular vectors of Y ordered so the first rank(Y) span its row space.
Matrix right_rotation(const Matrix& Y, Index& rank) {
  rank = numerical_rank(Y, kRankCutoff);
  if (Y.cols() == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeFullV);
  return svd.matrixV();
}

double spectral_scale(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
}

bool rank_at_most(const Matrix& B, Index k) {
  Eigen::JacobiSVD<Matrix> svd(B);
  const Vector& s = svd.singularValues();
  if (k >= s.size() || s(0) == 0.0) return true;
  return s(k) <= 1e-11 * s(0);
}

bool differs(const Matrix& B, const Matrix& A) { return (B - A).norm() > 1e-6 * std::max(A.norm(), 1.0); }

void check_orthonormal(const Matrix& M, const char* name) {
  if (M.cols() == 0) return;
  if ((M.transpose() * M - Matrix::Identity(M.cols(), M.cols())).norm() > 1e-10)
    throw ConfigError(std::string("witness_lowrank: ") + name + " must have orthonormal columns");
}

Vector null_vector(const Matrix& X, const char* who) {
  const Index n = X.rows();
  if (X.cols() != n - 1) throw ConfigError(std::string(who) + ": X must have N-1 columns");
  Matrix basis = complement(X);
  if (basis.cols() == 0) throw ConfigError(std::string(who) + ": X^T has a trivial nullspace");
  return basis.col(0);
}

// Rank-preserving perturbation A + d v^T (or u d^T) that keeps both products.
Witness rank_one_update(const Matrix& X, const Matrix& W, const Matrix& A, Index k) {
  const double scale = std::max(spectral_scale(A), 1.0);
  Matrix row_space = orth(Matrix(A.transpose()), kRankCutoff);
  Matrix col_space = orth(A, kRankCutoff);
  const Index r = row_space.cols();
  if (X.cols() < r) {
    Matrix v = orth(Matrix(row_space - X * (X.transpose() * row_space)), 1e-10);
    Vector d = complement(W).col(0);
    return {A + scale * d * v.col(0).transpose(), "case4/rank-one-row"};
  }
  if (W.cols() < r) {
    Matrix u = orth(Matrix(col_space - W * (W.transpose() * col_space)), 1e-10);
    Vector d = complement(X).col(0);
    return {A + scale * u.col(0) * d.transpose(), "case4/rank-one-col"};
  }
  if (r >= k) throw DegeneracyError("witness_lowrank: no rank-preserving perturbation available");
  Vector v = complement(X).col(0);
  Vector d = complement(W).col(0);
  return {A + scale * d * v.transpose(), "case4/rank-one-free"};
}

// Case 2: X lies in null(A). Case 3 is its transpose.
Matrix left_sided(const WitnessSplit& s, const Matrix& W, const Matrix& A) {
  Matrix B = s.Wt * (s.Wt.transpose() * A);
  if (differs(B, A)) return B;
  Vector v = complement(W).col(0);
  Vector z = s.Zt.col(0);
  return B + (std::max(A.norm(), 1.0) / z.norm()) * v * z.transpose();
}

}  // namespace

WitnessSplit split_witness_inputs(const Matrix& X, const Matrix& W, const Matrix& A) {
  WitnessSplit s;
  Matrix Y = A * X, Z = A.transpose() * W;
  Matrix Rx = right_rotation(Y, s.p), Rw = right_rotation(Z, s.q);
  Matrix Xr = X.cols() ? Matrix(X * Rx) : X;
  Matrix Wr = W.cols() ? Matrix(W * Rw) : W;
  s.Xt = Xr.leftCols(s.p);
  s.Xh = Xr.rightCols(X.cols() - s.p);
  s.Wt = Wr.leftCols(s.q);
  s.Wh = Wr.rightCols(W.cols() - s.q);
  s.Yt = A * s.Xt;
  s.Zt = A.transpose() * s.Wt;
  return s;
}

Matrix witness_family_member(const WitnessSplit& s, const Matrix& C) {
  const Index p = s.p, q = s.q;
  if (C.rows() != p || C.cols() != q) throw ShapeError("witness_family_member: C must be p x q");
  Matrix ZX = s.Zt.transpose() * s.Xt;  // q x p
  Matrix WYC = s.Wt.transpose() * s.Yt * C;  // q x q
  Matrix M(p + q, p + q);
  M.topLeftCorner(p, p) = Matrix::Identity(p, p) - C * ZX;
  M.topRightCorner(p, q) = C;
  M.bottomLeftCorner(q, p) = (WYC - Matrix::Identity(q, q)) * ZX;
  M.bottomRightCorner(q, q) = Matrix::Identity(q, q) - WYC;
  Matrix left(s.Yt.rows(), p + q), right(s.Xt.rows(), p + q);
  left << s.Yt, s.Wt;
  right << s.Xt, s.Zt;
  return left * M * right.transpose();
}

Witness witness_lowrank(const Matrix& X, const Matrix& W, const Matrix& A, Index k) {
  const Index n = A.rows();
  if (A.cols() != n || X.rows() != n || W.rows() != n) throw ShapeError("witness_lowrank: dimension mismatch");
  if (std::min(X.cols(), W.cols()) >= k || std::max(X.cols(), W.cols()) >= n)
    throw ConfigError("witness_lowrank: need min(k1, k2) < k and max(k1, k2) < N");
  check_orthonormal(X, "X");
  check_orthonormal(W, "W");
  if (numerical_rank(A, kRankCutoff) > k) throw ConfigError("witness_lowrank: A has rank above k");

  WitnessSplit s = split_witness_inputs(X, W, A);
  if (s.p == 0 && s.q == 0) {
    if (A.norm() > 0) return {(1.0 + std::max(A.norm(), 1.0) / A.norm()) * A, "case1"};
    Vector u = complement(W).col(0), v = complement(X).col(0);
    return {u * v.transpose(), "case1/zero"};
  }
  if (s.p == 0) return {left_sided(s, W, A), "case2"};
  if (s.q == 0) {
    WitnessSplit t = split_witness_inputs(W, X, Matrix(A.transpose()));
    return {Matrix(left_sided(t, X, Matrix(A.transpose())).transpose()), "case3"};
  }

  // Case 4. Look for v in row(A) with Xt^T v = 0; its image under B(C) picks the branch.
  Matrix C = Matrix::Ones(s.p, s.q);
  Matrix row_space = orth(Matrix(A.transpose()), kRankCutoff);
  Matrix free_rows = orth(Matrix(row_space - s.Xt * (s.Xt.transpose() * row_space)), 1e-10);
  Witness w;
  if (free_rows.cols() > 0) {
    Vector v = free_rows.col(0);
    Vector term = s.Yt * C * (s.Zt.transpose() * v);
    term -= s.Wt * (s.Wt.transpose() * term);
    if (term.norm() > 1e-12 * std::max(spectral_scale(A), 1.0)) {
      Matrix B = witness_family_member(s, C);
      w = differs(B, A) ? Witness{B, "case4(i)"} : Witness{witness_family_member(s, 2.0 * C), "case4(i)/2C"};
    } else {
      w = {witness_family_member(s, C), "case4(ii)"};
    }
  } else {
    Matrix B = witness_family_member(s, C);
    w = differs(B, A) ? Witness{B, "case4"} : Witness{witness_family_member(s, 2.0 * C), "case4/2C"};
  }
  if (differs(w.B, A) && rank_at_most(w.B, k)) return w;
  return rank_one_update(X, W, A, k);
}

Witness witness_symmetric(const Matrix& A, const Matrix& X) {
  Vector v = null_vector(X, "witness_symmetric");
  return {A + v * v.transpose(), "rank-one symmetric"};
}

Witness witness_orthogonal(const Matrix& A, const Matrix& X) {
  Vector v = null_vector(X, "witness_orthogonal");
  return {A - 2.0 * (A * v) * v.transpose(), "householder"};
}

namespace {

Certificate upper(std::string name, double value, double bound) { return {std::move(name), value, bound, value <= bound}; }
Certificate lower(std::string name, double value, double bound) { return {std::move(name), value, bound, value > bound}; }

double sigma_ratio(const Matrix& B, Index k) {
  Eigen::JacobiSVD<Matrix> svd(B);
  const Vector& s = svd.singularValues();
  if (k >= s.size() || s(0) == 0.0) return 0.0;
  return s(k) / s(0);
}

}  // namespace

std::vector<Certificate> certify_lowrank(const Matrix& X, const Matrix& W, const Matrix& A, Index k, const Matrix& B) {
  const double tol = 1e-11 * std::max(1.0, A.norm());
  return {upper("forward products", ((B - A) * X).norm(), tol),
          upper("transpose products", ((B - A).transpose() * W).norm(), tol),
          upper("rank bound sigma_{k+1}/sigma_1", sigma_ratio(B, k), 1e-11),
          lower("distinct from A", (B - A).norm(), 1e-6 * std::max(A.norm(), 1.0))};
}

std::vector<Certificate> certify_symmetric(const Matrix& A, const Matrix& X, const Matrix& B) {
  const double tol = 1e-12 * std::max(1.0, A.norm());
  return {upper("forward products", ((B - A) * X).norm(), tol),
          upper("symmetry", (B - B.transpose()).norm(), tol),
          lower("distinct from A", (B - A).norm(), 1e-6 * std::max(A.norm(), 1.0))};
}

std::vector<Certificate> certify_orthogonal(const Matrix& A, const Matrix& X, const Matrix& B) {
  const Index n = B.rows();
  return {upper("forward products", ((B - A) * X).norm(), 1e-12 * std::max(1.0, A.norm())),
          upper("orthogonality", (B.transpose() * B - Matrix::Identity(n, n)).norm(), 1e-12),
          lower("distinct from A", (B - A).norm(), 1e-6 * std::max(A.norm(), 1.0))};
}

}  // namespace mvr
