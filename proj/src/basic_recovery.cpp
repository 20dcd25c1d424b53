#include "mvr/basic_recovery.hpp"

#include "mvr/numerics.hpp"
#include "mvr/random.hpp"

namespace mvr {

DiagonalForm recover_diagonal(const Oracle& oracle) {
  return DiagonalForm{oracle.query(Vector(Vector::Ones(oracle.dim())))};
}

DenseForm recover_block_diagonal(const Oracle& oracle, Index k) {
  const Index n = oracle.dim();
  if (k <= 0 || n % k != 0) throw ConfigError("recover_block_diagonal: block size must divide N");
  Matrix X = Matrix::Zero(n, k);
  for (Index i = 0; i < n; ++i) X(i, i % k) = 1.0;
  Matrix Y = oracle.query(X);
  Matrix A = Matrix::Zero(n, n);
  for (Index b = 0; b < n; b += k) A.block(b, b, k, k) = Y.middleRows(b, k);
  return DenseForm{A};
}

namespace {

Matrix parity_probes(Index n) {
  Matrix X = Matrix::Zero(n, 2);
  for (Index i = 0; i < n; ++i) X(i, i % 2) = 1.0;
  return X;
}

}  // namespace

TridiagonalForm recover_tridiagonal(const Oracle& oracle, TridiagonalMode mode) {
  const Index n = oracle.dim();
  TridiagonalForm f;
  f.main = Vector::Zero(n);
  f.sub = Vector::Zero(std::max<Index>(n - 1, 0));
  f.super = Vector::Zero(std::max<Index>(n - 1, 0));

  if (mode == TridiagonalMode::comb) {
    Matrix X = Matrix::Zero(n, 3);
    for (Index i = 0; i < n; ++i) X(i, i % 3) = 1.0;
    Matrix Y = oracle.query(X);
    for (Index i = 0; i < n; ++i) {
      f.main(i) = Y(i, i % 3);
      if (i + 1 < n) f.super(i) = Y(i, (i + 1) % 3);
      if (i > 0) f.sub(i - 1) = Y(i, (i - 1) % 3);
    }
    return f;
  }

  // Row i of the same-parity probe reads the diagonal; the other probe reads
  // sub(i-1) + super(i). Column sums from A^T 1 close the recursion.
  Matrix Y = oracle.query(parity_probes(n));
  Vector colsum = oracle.query_transpose(Vector(Vector::Ones(n)));
  for (Index i = 0; i < n; ++i) {
    f.main(i) = Y(i, i % 2);
    double off = Y(i, (i + 1) % 2);
    if (i + 1 < n) f.super(i) = off - (i > 0 ? f.sub(i - 1) : 0.0);
    if (i + 1 < n) f.sub(i) = colsum(i) - f.main(i) - (i > 0 ? f.super(i - 1) : 0.0);
  }
  return f;
}

TridiagonalForm recover_symmetric_tridiagonal(const Oracle& oracle) {
  const Index n = oracle.dim();
  TridiagonalForm f;
  f.symmetric = true;
  f.main = Vector::Zero(n);
  f.super = Vector::Zero(std::max<Index>(n - 1, 0));
  Matrix Y = oracle.query(parity_probes(n));
  for (Index i = 0; i < n; ++i) {
    f.main(i) = Y(i, i % 2);
    if (i + 1 < n) f.super(i) = Y(i, (i + 1) % 2) - (i > 0 ? f.super(i - 1) : 0.0);
  }
  f.sub = f.super;
  return f;
}

CirculantForm recover_circulant(const Oracle& oracle, ProbeMode mode, std::uint64_t seed) {
  const Index n = oracle.dim();
  if (mode == ProbeMode::deterministic) return CirculantForm{oracle.query(Vector(Vector::Unit(n, 0)))};
  if (!is_power_of_two(n)) throw ConfigError("recover_circulant: randomized mode needs a power-of-two N");
  GaussianStream rng(seed, streams::circulant);
  Vector g = rng.vector(n);
  ComplexVector fg = fft(g);
  if (fg.cwiseAbs().minCoeff() < 1e-12 * g.norm())
    throw IllConditionedError("recover_circulant: probe has a vanishing Fourier coefficient; reseed");
  Vector y = oracle.query(g);
  ComplexVector fy = fft(y);
  return CirculantForm{ifft(fy.cwiseQuotient(fg)).real()};
}

Matrix toeplitz_probe_rows(const Vector& g) {
  const Index n = g.size();
  Matrix L = Matrix::Zero(n, 2 * n - 1);
  for (Index i = 0; i < n; ++i) {
    for (Index d = 0; d <= i; ++d) L(i, d) = g(i - d);
    // t2[d] sits in column n + (n - 1 - d) for d = n-1 .. 1.
    for (Index d = 1; i + d < n; ++d) L(i, n + (n - 1 - d)) = g(i + d);
  }
  return L;
}

ToeplitzForm toeplitz_from_unknowns(const Vector& a) {
  const Index n = (a.size() + 1) / 2;
  ToeplitzForm f{a.head(n), Vector(n)};
  f.t2(0) = f.t1(0);
  for (Index d = 1; d < n; ++d) f.t2(d) = a(n + (n - 1 - d));
  return f;
}

ToeplitzForm recover_toeplitz(const Oracle& oracle, ProbeMode mode, std::uint64_t seed) {
  const Index n = oracle.dim();
  if (mode == ProbeMode::deterministic) {
    Vector e1 = Vector::Unit(n, 0);
    ToeplitzForm f{oracle.query(e1), oracle.query_transpose(e1)};
    return f;
  }
  GaussianStream rng(seed, streams::toeplitz);
  Matrix probes = rng.matrix(n, 2);
  Matrix out = oracle.query(probes);
  Matrix L(2 * n, 2 * n - 1);
  L << toeplitz_probe_rows(probes.col(0)), toeplitz_probe_rows(probes.col(1));
  Vector rhs(2 * n);
  rhs << out.col(0), out.col(1);
  Eigen::ColPivHouseholderQR<Matrix> qr(L);
  qr.setThreshold(1e-12);
  if (qr.rank() < 2 * n - 1) throw IllConditionedError("recover_toeplitz: probe system is rank deficient; reseed");
  return toeplitz_from_unknowns(qr.solve(rhs));
}

HankelForm recover_hankel(const Oracle& oracle, std::uint64_t seed) {
  const Index n = oracle.dim();
  // Reversing the rows of a Hankel matrix gives a Toeplitz matrix.
  Oracle reversed(
      n, [oracle](const Matrix& X) -> Matrix { return oracle.query(X).colwise().reverse(); },
      [](const Matrix&) -> Matrix { throw ConfigError("recover_hankel: transpose probes are not used"); });
  ToeplitzForm t = recover_toeplitz(reversed, ProbeMode::randomized, seed);
  HankelForm h{Vector(2 * n - 1)};
  // H(i, j) = T(n-1-i, j).
  for (Index s = 0; s < n; ++s) h.h(s) = t.t1(n - 1 - s);
  for (Index s = n; s < 2 * n - 1; ++s) h.h(s) = t.t2(s - n + 1);
  return h;
}

DisplacementForm recover_toeplitz_like(const Oracle& oracle, Index p, std::uint64_t seed) {
  const Index n = oracle.dim();
  if (p < 0) throw ConfigError("recover_toeplitz_like: oversampling must be nonnegative");
  const Index width = 2 + p;
  GaussianStream rng(seed, streams::toeplitz_like);
  Matrix X = rng.matrix(n, width);
  Matrix Y = rng.matrix(n, width);

  Matrix right_sketch = shift_apply(1.0, oracle.query(X)) - oracle.query(shift_apply(-1.0, X));
  Matrix left_sketch =
      oracle.query_transpose(shift_transpose_apply(1.0, Y)) - shift_transpose_apply(-1.0, oracle.query_transpose(Y));

  Matrix core = Y.transpose() * right_sketch;
  if (numerical_rank(core) < numerical_rank(right_sketch))
    throw IllConditionedError("recover_toeplitz_like: Nystrom core is degenerate; reseed");
  Matrix M = right_sketch * pinv(core) * left_sketch.transpose();

  DisplacementForm f;
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.G = svd.matrixU().leftCols(2) * svd.singularValues().head(2).asDiagonal();
  f.H = svd.matrixV().leftCols(2);
  f.dense = sylvester_solve(shift_matrix(n, 1.0), shift_matrix(n, -1.0), M);
  return f;
}

}  // namespace mvr
