#include "mvr/lowrank.hpp"
#include "mvr/random.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace mvr;

namespace {

Matrix reconstruct(const LowRankForm& f) { return f.U * f.V.transpose(); }

Matrix orthonormal(ref::Gen& g, Index n, Index c) { return g.orthonormal(n, c); }

bool all_pass(const std::vector<Certificate>& certs) {
  for (const auto& c : certs)
    if (!c.pass) return false;
  return true;
}

// Geometric spectrum rho^j with random singular vectors.
Matrix decaying(ref::Gen& g, Index n, double rho) {
  Matrix U = g.orthonormal(n, n), V = g.orthonormal(n, n);
  Vector s(n);
  for (Index j = 0; j < n; ++j) s(j) = std::pow(rho, double(j));
  return U * s.asDiagonal() * V.transpose();
}

}  // namespace

TEST_CASE("rsvd recovers an outer product with ledger (6, 1)") {
  ref::Gen g(1);
  Matrix A = g.vector(40) * g.vector(40).transpose();
  Oracle o = Oracle::dense(A);
  LowRankForm f = rsvd_recover(o, {1, 5, 3});
  CHECK(ref::rel_fro(A, reconstruct(f)) <= 1e-12);
  CHECK(o.ledger() == QueryLedger{6, 1});
}

TEST_CASE("rsvd on the zero matrix gives an exact zero") {
  Oracle o = Oracle::dense(Matrix::Zero(12, 12));
  LowRankForm f = rsvd_recover(o, {2, 5, 0});
  CHECK(reconstruct(f).cwiseAbs().maxCoeff() == 0.0);
  CHECK(o.ledger() == QueryLedger{7, 2});
}

TEST_CASE("rsvd is exact on rank-k inputs over 100 seeds") {
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ref::Gen g(seed + 100);
    const Index n = g.integer(10, 80), k = g.integer(1, std::min<Index>(8, n - 6)), p = g.integer(0, 6);
    Matrix A = g.matrix(n, k) * g.matrix(n, k).transpose();
    Oracle o = Oracle::dense(A);
    LowRankForm f = rsvd_recover(o, {k, p, seed});
    if (ref::rel_fro(A, reconstruct(f)) > 1e-11) ++failures;
    CHECK(o.ledger() == QueryLedger{k + p, k});
  }
  CHECK(failures == 0);
}

TEST_CASE("rsvd on decaying spectra stays within ten times the tail ratio") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ref::Gen g(seed + 7);
    Matrix A = decaying(g, 64, 0.5);
    for (Index k : {1, 3, 8}) {
      Oracle o = Oracle::dense(A);
      LowRankForm f = rsvd_recover(o, {k, 5, seed});
      CHECK(ref::rel_spectral(A, reconstruct(f)) <= 10 * ref::tail_ratio(A, k));
    }
  }
}

TEST_CASE("Nystrom recovers a symmetric outer product") {
  ref::Gen g(2);
  Vector v = g.vector(50);
  Matrix A = v * v.transpose();
  Oracle o = Oracle::dense(A);
  LowRankForm f = nystrom_recover_symmetric(o, {1, 5, 1});
  CHECK(ref::rel_fro(A, reconstruct(f)) <= 1e-11);
  CHECK(o.ledger() == QueryLedger{6, 0});
}

TEST_CASE("Nystrom on zero and on rank-k symmetric inputs") {
  Oracle z = Oracle::dense(Matrix::Zero(10, 10));
  CHECK(reconstruct(nystrom_recover_symmetric(z, {2, 3, 0})).cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.ledger() == QueryLedger{5, 0});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ref::Gen g(seed + 40);
    const Index n = g.integer(16, 64), k = g.integer(1, 6);
    Matrix F = g.matrix(n, k);
    Matrix D = Vector(g.vector(k)).asDiagonal();
    Matrix A = F * D * F.transpose();
    Oracle o = Oracle::dense(A);
    LowRankForm f = nystrom_recover_symmetric(o, {k, 5, seed});
    CHECK(ref::rel_fro(A, reconstruct(f)) <= 1e-10);
    CHECK(o.ledger() == QueryLedger{k + 5, 0});
  }
}

TEST_CASE("low-rank witness for the zero matrix") {
  ref::Gen g(3);
  Matrix X = orthonormal(g, 6, 1), W = orthonormal(g, 6, 1), A = Matrix::Zero(6, 6);
  Witness w = witness_lowrank(X, W, A, 2);
  CHECK(w.construction == "case1/zero");
  CHECK((w.B * X).norm() <= 1e-14);
  CHECK((w.B.transpose() * W).norm() <= 1e-14);
  CHECK(w.B.norm() > 0.5);
  CHECK(ref::tail_ratio(w.B, 1) <= 1e-12);
}

TEST_CASE("low-rank witness at N=6, k=2 with one query on each side") {
  GaussianStream s(21, streams::witness);
  Matrix A = s.matrix(6, 2) * s.matrix(6, 2).transpose();
  Matrix X = orth(s.matrix(6, 1)), W = orth(s.matrix(6, 1));
  Matrix B = witness_lowrank(X, W, A, 2).B;
  CHECK(((B - A) * X).norm() <= 1e-11);
  CHECK(((B - A).transpose() * W).norm() <= 1e-11);
  CHECK(ref::tail_ratio(B, 2) <= 1e-11);
  CHECK((B - A).norm() > 1e-6 * A.norm());
  CHECK(all_pass(certify_lowrank(X, W, A, 2, B)));
}

TEST_CASE("family members for C and 2C match the same products") {
  GaussianStream s(21, streams::witness);
  Matrix A = s.matrix(6, 2) * s.matrix(6, 2).transpose();
  Matrix X = orth(s.matrix(6, 1)), W = orth(s.matrix(6, 1));
  WitnessSplit split = split_witness_inputs(X, W, A);
  REQUIRE(split.p == 1);
  REQUIRE(split.q == 1);
  Matrix C = Matrix::Ones(1, 1);
  Matrix B1 = witness_family_member(split, C), B2 = witness_family_member(split, 2.0 * C);
  for (const Matrix& B : {B1, B2}) {
    CHECK(((B - A) * X).norm() <= 1e-11);
    CHECK(((B - A).transpose() * W).norm() <= 1e-11);
  }
  CHECK((B1 - B2).norm() > 1e-6);
}

TEST_CASE("low-rank witnesses certify across random shapes") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ref::Gen g(seed + 500);
    const Index n = g.integer(4, 24), k = g.integer(2, n - 1);
    Index k1 = g.integer(1, k - 1), k2 = g.integer(1, n - 1);
    if (g.integer(0, 1)) std::swap(k1, k2);
    const Index r = g.integer(0, k);
    Matrix A = r == 0 ? Matrix::Zero(n, n) : Matrix(g.matrix(n, r) * g.matrix(n, r).transpose());
    Matrix X = g.orthonormal(n, k1), W = g.orthonormal(n, k2);
    Witness w = witness_lowrank(X, W, A, k);
    CAPTURE(seed);
    CAPTURE(w.construction);
    CHECK(all_pass(certify_lowrank(X, W, A, k, w.B)));
  }
}

TEST_CASE("low-rank witness preconditions") {
  ref::Gen g(4);
  Matrix A = g.matrix(6, 2) * g.matrix(6, 2).transpose();
  CHECK_THROWS_AS(witness_lowrank(g.orthonormal(6, 2), g.orthonormal(6, 3), A, 2), ConfigError);
  CHECK_THROWS_AS(witness_lowrank(g.orthonormal(6, 1), g.orthonormal(6, 6), A, 2), ConfigError);
  CHECK_THROWS_AS(witness_lowrank(g.orthonormal(6, 1), g.orthonormal(6, 1), g.matrix(6, 6), 2), ConfigError);
  CHECK_THROWS_AS(witness_lowrank(g.orthonormal(5, 1), g.orthonormal(6, 1), A, 2), ShapeError);
}

TEST_CASE("symmetric witness") {
  SUBCASE("zero matrix with canonical queries") {
    Matrix X = Matrix::Identity(5, 4);
    Matrix B = witness_symmetric(Matrix::Zero(5, 5), X).B;
    Matrix expect = Matrix::Zero(5, 5);
    expect(4, 4) = 1;
    CHECK((B - expect).norm() <= 1e-14);
  }
  SUBCASE("random symmetric N=8") {
    ref::Gen g(2);
    Matrix A = g.symmetric(8), X = g.matrix(8, 7);
    Matrix B = witness_symmetric(A, X).B;
    CHECK(((B - A) * X).norm() <= 1e-12);
    CHECK(std::abs((B - A).norm() - 1.0) <= 1e-12);
    CHECK(all_pass(certify_symmetric(A, X, B)));
  }
  SUBCASE("positive definite stays positive definite") {
    ref::Gen g(9);
    Matrix F = g.matrix(8, 8);
    Matrix A = F * F.transpose() + 0.1 * Matrix::Identity(8, 8);
    Matrix B = witness_symmetric(A, g.matrix(8, 7)).B;
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(B).eigenvalues().minCoeff() > 0);
  }
  SUBCASE("full-rank queries are rejected") {
    ref::Gen g(1);
    CHECK_THROWS_AS(witness_symmetric(g.symmetric(4), g.matrix(4, 4)), ConfigError);
  }
}

TEST_CASE("orthogonal witness") {
  SUBCASE("identity with canonical queries") {
    Matrix B = witness_orthogonal(Matrix::Identity(5, 5), Matrix::Identity(5, 4)).B;
    Matrix expect = Matrix::Identity(5, 5);
    expect(4, 4) = -1;
    CHECK((B - expect).norm() <= 1e-14);
  }
  SUBCASE("random orthogonal N=8") {
    ref::Gen g(5);
    Matrix A = g.orthonormal(8, 8), X = g.matrix(8, 7);
    Matrix B = witness_orthogonal(A, X).B;
    CHECK(((B - A) * X).norm() <= 1e-12);
    CHECK((B.transpose() * B - Matrix::Identity(8, 8)).norm() <= 1e-12);
    CHECK(std::abs((B - A).norm() - 2.0) <= 1e-12);
    CHECK(all_pass(certify_orthogonal(A, X, B)));
  }
}
