#include "mvr/oracle.hpp"
#include "mvr/random.hpp"
#include "mvr/structured.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace mvr;

TEST_CASE("identity oracle returns e2 and counts one forward query") {
  Oracle o = Oracle::dense(Matrix::Identity(3, 3));
  CHECK(o.ledger().m == 0);
  Vector e2 = Vector::Unit(3, 1);
  CHECK(o.query(e2) == e2);
  CHECK(o.ledger() == QueryLedger{1, 0});
}

TEST_CASE("diagonal oracle applied to the ones vector") {
  Oracle o = Oracle::dense(Vector(Eigen::Vector3d(3, 1, 4)).asDiagonal().toDenseMatrix());
  CHECK(o.query(Vector::Ones(3)) == Vector(Eigen::Vector3d(3, 1, 4)));
}

TEST_CASE("forward and transpose batches match a triple-loop product") {
  ref::Gen g(1);
  Matrix A = g.matrix(8, 8);
  Oracle o = Oracle::dense(A);
  Matrix X = g.matrix(8, 3);
  Matrix Y = o.query(X), Yr = ref::triple_loop(A, X);
  CHECK((Y - Yr).cwiseAbs().maxCoeff() <= 1e-14 * Yr.cwiseAbs().maxCoeff());
  ref::Gen g2(2);
  Matrix A2 = g2.matrix(8, 8), X2 = g2.matrix(8, 2);
  Oracle o2 = Oracle::dense(A2);
  Matrix Z = o2.query_transpose(X2), Zr = ref::triple_loop(A2.transpose(), X2);
  CHECK((Z - Zr).cwiseAbs().maxCoeff() <= 1e-14 * Zr.cwiseAbs().maxCoeff());
  CHECK(o.ledger() == QueryLedger{3, 0});
  CHECK(o2.ledger() == QueryLedger{0, 2});
}

TEST_CASE("transpose of symmetric and rank-one oracles") {
  ref::Gen g(3);
  Oracle s = Oracle::dense(g.symmetric(6));
  Vector x = g.vector(6);
  CHECK((s.query_transpose(x) - s.query(x)).cwiseAbs().maxCoeff() <= 1e-14);
  Matrix A = Matrix::Zero(2, 2);
  A(0, 1) = 1;
  CHECK(Oracle::dense(A).query_transpose(Vector::Unit(2, 0)) == Vector::Unit(2, 1));
}

TEST_CASE("dimension mismatch raises a shape error") {
  Oracle o = Oracle::dense(Matrix::Identity(4, 4));
  CHECK_THROWS_AS(o.query(Matrix::Zero(3, 1)), ShapeError);
  CHECK_THROWS_AS(o.query_transpose(Matrix::Zero(5, 2)), ShapeError);
  CHECK(o.ledger() == QueryLedger{0, 0});
}

TEST_CASE("ledger grows by batch width and never decreases") {
  ref::Gen g(4);
  Oracle o = Oracle::dense(g.matrix(5, 5));
  QueryLedger prev = o.ledger();
  for (int t = 0; t < 30; ++t) {
    const Index s = g.integer(1, 4);
    const bool tr = g.integer(0, 1);
    tr ? o.query_transpose(g.matrix(5, s)) : o.query(g.matrix(5, s));
    QueryLedger now = o.ledger();
    CHECK(now.m == prev.m + (tr ? 0 : s));
    CHECK(now.n == prev.n + (tr ? s : 0));
    prev = now;
  }
}

TEST_CASE("oracles are linear for every structure kind") {
  const FormKind kinds[] = {FormKind::diagonal,  FormKind::block_diagonal, FormKind::tridiagonal,
                            FormKind::circulant, FormKind::toeplitz,       FormKind::hankel,
                            FormKind::displacement, FormKind::lowrank,     FormKind::hss,
                            FormKind::hodlr,     FormKind::dense};
  for (FormKind kind : kinds) {
    CAPTURE(to_string(kind));
    Oracle o = make_oracle(random_form(kind, 16, 2, 9));
    ref::Gen g(10 + int(kind));
    for (int t = 0; t < 100; ++t) {
      Vector x = g.vector(16), y = g.vector(16);
      const double a = g.normal(), b = g.normal();
      for (bool tr : {false, true}) {
        auto q = [&](const Vector& v) { return tr ? o.query_transpose(v) : o.query(v); };
        Vector lhs = q(a * x + b * y), rhs = a * q(x) + b * q(y);
        const double scale = std::abs(a) * q(x).norm() + std::abs(b) * q(y).norm() + 1e-300;
        REQUIRE((lhs - rhs).norm() <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("zero noise is bit-identical to the clean oracle") {
  ref::Gen g(5);
  Matrix A = g.matrix(10, 10);
  Oracle clean = Oracle::dense(A);
  Oracle noisy = with_noise(clean, {0.0, 77});
  Matrix X = g.matrix(10, 4);
  CHECK(clean.query(X) == noisy.query(X));
  CHECK(clean.query_transpose(X) == noisy.query_transpose(X));
}

TEST_CASE("noise norm concentrates at eps sqrt(N)") {
  const Index n = 1024;
  const double eps = 1e-5;
  Oracle zero = Oracle::dense(Matrix::Zero(n, n));
  Oracle noisy = with_noise(zero, {eps, 123});
  Matrix out = noisy.query(Matrix::Zero(n, 1000));
  double mean = 0;
  for (Index j = 0; j < out.cols(); ++j) mean += out.col(j).norm() / 1000.0;
  CHECK(mean >= eps * std::sqrt(double(n)) * 0.95);
  CHECK(mean <= eps * std::sqrt(double(n)) * 1.05);
  CHECK(noisy.ledger() == QueryLedger{1000, 0});
}

TEST_CASE("noise is a pure function of seed and query index") {
  Oracle zero = Oracle::dense(Matrix::Zero(6, 6));
  Oracle a = with_noise(zero, {1e-3, 9}), b = with_noise(zero, {1e-3, 9}), c = with_noise(zero, {1e-3, 10});
  Matrix one = a.query(Matrix::Zero(6, 3));
  // Same columns issued one at a time give the same perturbations.
  Matrix split(6, 3);
  split.col(0) = b.query(Vector::Zero(6));
  split.rightCols(2) = b.query_transpose(Matrix::Zero(6, 2));
  CHECK(one == split);
  CHECK(one != c.query(Matrix::Zero(6, 3)));
}

TEST_CASE("padded oracle embeds the matrix and ignores padding") {
  ref::Gen g(6);
  Matrix A = g.matrix(5, 5);
  Oracle p = padded_oracle(Oracle::dense(A), 8, padding_offset(5, 8));
  CHECK(padding_offset(5, 8) == 1);
  Vector y = g.vector(5);
  Vector in = Vector::Zero(8);
  in.segment(1, 5) = y;
  Vector expect = Vector::Zero(8);
  expect.segment(1, 5) = A * y;
  CHECK((p.query(in) - expect).norm() <= 1e-14 * expect.norm());
  Vector junk = in;
  junk(0) = 3;
  junk(7) = -2;
  CHECK(p.query(junk) == p.query(in));
  Vector t = p.query_transpose(in);
  CHECK(t(0) == 0.0);
  CHECK(t.tail(2).isZero(0));
}
