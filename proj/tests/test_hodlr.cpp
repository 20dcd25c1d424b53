#include "mvr/hodlr.hpp"
#include "mvr/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace mvr;

namespace {

double rel_err(const Matrix& A, const HodlrForm& rec) { return ref::rel_spectral(A, hodlr_materialize(rec)); }

const LevelPlan* plan_for(const HodlrReport& rep, Index level) {
  for (const LevelPlan& p : rep.levels)
    if (p.level == level) return &p;
  return nullptr;
}

// Keeps entries whose off-diagonal level (0-based, top split = 0) is below `levels`.
Matrix masked(const Matrix& A, Index leaf, Index levels) {
  const Index n = A.rows(), depth = ref::ilog2(n);
  Matrix M = Matrix::Zero(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) {
      const Index x = r ^ c;
      if (x < leaf) continue;
      Index hi = 0;
      while ((Index(1) << (hi + 1)) <= x) ++hi;
      if (depth - 1 - hi < levels) M(r, c) = A(r, c);
    }
  return M;
}

// Blacklist holding the true factors of every level before `level` (0-based).
Blacklist truth_blacklist(const HodlrForm& f, Index level) {
  Blacklist bl;
  bl.n = f.n;
  for (Index l = 0; l < level; ++l)
    for (Index j = 0; j < Index(f.levels[l].size()); ++j) {
      auto [c1, c2] = hodlr_children(f.n, l, j);
      bl.add(l, c1, f.levels[l][j].V);
      bl.add(l, c2, f.levels[l][j].U);
    }
  return bl;
}

}  // namespace

TEST_CASE("stop level by integer scan") {
  CHECK(stop_level(1024, 1, 5) == 7);
  CHECK(stop_level(8, 1, 0) == 3);
  CHECK(stop_level(8, 1, 5) == 1);
  CHECK_THROWS_AS(stop_level(100, 1, 5), ConfigError);
  for (Index n = 3; n <= 16; ++n)
    for (Index k : {1, 2, 4})
      for (Index p : {0, 2, 5, 10}) {
        const Index w = stop_level(Index(1) << n, k, p);
        CAPTURE(n);
        CHECK(w <= n);
        CHECK(double(w) > double(n) - std::log2(double(n * k + p)) - 1);
        // w is the first level where the projected dimension drops below k + p.
        if (w < n) CHECK((Index(1) << (n - w)) - (w - 1) * k < k + p);
        for (Index l = 1; l < w; ++l) CHECK((Index(1) << (n - l)) - (l - 1) * k >= k + p);
      }
}

TEST_CASE("input projection") {
  ref::Gen g(1);
  Blacklist empty;
  empty.n = 16;
  Matrix X = g.matrix(16, 3);
  CHECK(project_inputs(X, empty, {{0, 8}}) == X);

  Blacklist full;
  full.n = 4;
  full.add(0, {0, 4}, g.matrix(4, 4));
  CHECK(project_inputs(g.matrix(4, 2), full, {{0, 4}}).norm() <= 1e-13);

  HodlrForm f = random_hodlr(64, 1, 2, true);
  Blacklist bl = truth_blacklist(f, 1);
  std::vector<Range> ranges{{0, 16}, {32, 16}};
  Matrix P = project_inputs(g.matrix(64, 6), bl, ranges);
  for (const Range& r : ranges)
    CHECK((bl.restrict(r).transpose() * P.middleRows(r.begin, r.size)).norm() <= 1e-12);
  CHECK(bl.columns() == 1);
}

TEST_CASE("projected inputs isolate one level's blocks") {
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    for (Index n : {64, 256}) {
      const Index k = 1 + Index(seed % 2);
      HodlrForm f = random_hodlr(n, k, seed, true);
      Matrix A = hodlr_materialize(f);
      ref::Gen g(seed + 3);
      for (Index level = 1; level < Index(f.levels.size()); ++level) {
        Blacklist bl = truth_blacklist(f, level);
        std::vector<Range> firsts;
        Matrix X = Matrix::Zero(n, k + 2);
        for (Index j = 0; j < Index(f.levels[level].size()); ++j) {
          Range c1 = hodlr_children(n, level, j).first;
          X.middleRows(c1.begin, c1.size) = g.matrix(c1.size, k + 2);
          firsts.push_back(c1);
        }
        Matrix P = project_inputs(X, bl, firsts);
        Matrix Y = A * P;
        for (Index j = 0; j < Index(f.levels[level].size()); ++j) {
          auto [c1, c2] = hodlr_children(n, level, j);
          Matrix alone = A.block(c2.begin, c1.begin, c2.size, c1.size) * P.middleRows(c1.begin, c1.size);
          CHECK((Y.middleRows(c2.begin, c2.size) - alone).norm() <= 1e-11 * ref::norm2(A) * X.norm());
        }
      }
    }
}

TEST_CASE("generic rank-1 recovery at N=1024") {
  HodlrForm f = random_hodlr(1024, 1, 17, true);
  Matrix A = hodlr_materialize(f);
  Oracle o = Oracle::dense(A);
  HodlrReport rep = recover_hodlr_generic_rank1(o, 5, 17);
  CHECK(rel_err(A, rep.form) <= 1e-10);
  CHECK(o.ledger().n == 0);
  CHECK(o.ledger().m <= (6 + 5) * 10 + 5 * 5);
  CHECK(rep.stop == 7);
  CHECK(rep.blacklist_columns <= rep.stop - 1);
}

TEST_CASE("generic rank-1 recovery at N=8") {
  HodlrForm f = random_hodlr(8, 1, 4, true);
  Matrix A = hodlr_materialize(f);
  Oracle o = Oracle::dense(A);
  HodlrReport rep = recover_hodlr_generic_rank1(o, 0, 4);
  CHECK(ref::rel_fro(A, hodlr_materialize(rep.form)) <= 1e-12);
}

TEST_CASE("symmetric rank-2 recovery at N=256 stays within its budget") {
  HodlrForm f = random_hodlr(256, 2, 3, true);
  Matrix A = hodlr_materialize(f);
  Oracle o = Oracle::dense(A);
  HodlrConfig cfg;
  cfg.k = 2;
  cfg.seed = 3;
  HodlrReport rep = recover_hodlr_symmetric(o, cfg);
  CHECK(rel_err(A, rep.form) <= 1e-10);
  CHECK(o.ledger().total() <= (6 * 2 + 2 * 5) * 8);
  CHECK(rep.blacklist_columns <= 2 * (rep.stop - 1));
}

TEST_CASE("on generic instances the symmetric path has no failures and matches the generic path") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    HodlrForm f = random_hodlr(128, 1, seed, true);
    Matrix A = hodlr_materialize(f);
    Oracle o1 = Oracle::dense(A), o2 = Oracle::dense(A);
    HodlrConfig cfg;
    cfg.seed = seed;
    HodlrReport sym = recover_hodlr_symmetric(o1, cfg);
    HodlrReport gen = recover_hodlr_generic_rank1(o2, 5, seed);
    for (const LevelPlan& p : sym.levels) {
      CHECK_FALSE(p.output_pass);
      for (const BlockStatus& s : p.status) CHECK((s.lower && s.upper));
    }
    CHECK(sym.restricted_residual <= 1e-10 * A.norm());
    CHECK(ref::rel_fro(hodlr_materialize(sym.form), hodlr_materialize(gen.form)) <= 1e-11);
  }
}

TEST_CASE("adversarial 8 x 8 fixture fails exactly the expected blocks") {
  ref::Gen g(81);
  HodlrForm f;
  f.n = f.logical_n = 8;
  f.leaf = 2;
  f.symmetric = true;
  auto node = [](const Matrix& U, const Matrix& V) { return HodlrNode{U, V, V, U}; };
  Vector u0 = g.vector(4), v0 = g.vector(4);
  f.levels.push_back({node(u0, v0)});
  // Upper node: lower block's columns lie in the blacklist, upper block is free.
  HodlrNode n1 = node(g.vector(2), 1.7 * v0.head(2));
  // Lower node: both blocks are built from the blacklist restricted to its children.
  HodlrNode n2 = node(-0.6 * u0.tail(2), 2.3 * u0.head(2));
  f.levels.push_back({n1, n2});
  for (int i = 0; i < 4; ++i) f.leaves.push_back(g.symmetric(2));
  Matrix A = hodlr_materialize(f);
  CHECK((A - A.transpose()).norm() <= 1e-15);

  Oracle o = Oracle::dense(A);
  HodlrConfig cfg;
  cfg.k = 1;
  cfg.p = 0;
  cfg.seed = 8;
  HodlrReport rep = recover_hodlr_symmetric(o, cfg);
  const LevelPlan* two = plan_for(rep, 2);
  REQUIRE(two != nullptr);
  REQUIRE(two->status.size() == 2);
  CHECK_FALSE(two->status[0].lower);
  CHECK(two->status[0].upper);
  CHECK_FALSE(two->status[1].lower);
  CHECK_FALSE(two->status[1].upper);
  CHECK(two->output_pass);
  CHECK(ref::rel_fro(A, hodlr_materialize(rep.form)) <= 1e-11);
}

TEST_CASE("strict generic path refuses degenerate blocks") {
  HodlrForm f = random_hodlr(64, 1, 9, true);
  f.levels[1][0].V = 3.0 * f.levels[0][0].V.topRows(16);
  f.levels[1][0].W = f.levels[1][0].V;
  Oracle o = Oracle::dense(hodlr_materialize(f));
  CHECK_THROWS_AS(recover_hodlr_generic_rank1(o, 5, 1), DegeneracyError);
}

TEST_CASE("general recovery of a nonsymmetric matrix at N=128") {
  HodlrForm f = random_hodlr(128, 1, 6, false);
  Matrix A = hodlr_materialize(f);
  Oracle o = Oracle::dense(A);
  HodlrConfig cfg;
  cfg.seed = 6;
  HodlrReport rep = recover_hodlr_general(o, cfg);
  CHECK(rel_err(A, rep.form) <= 1e-10);
  CHECK(o.ledger().total() <= (10 + 4 * 5) * 7);
}

TEST_CASE("general recovery pads N=100 to 128") {
  HodlrForm f = random_hodlr(100, 1, 7, false);
  CHECK(f.n == 128);
  Matrix A = hodlr_materialize(f);
  REQUIRE(A.rows() == 100);
  Oracle o = Oracle::dense(A);
  HodlrConfig cfg;
  cfg.seed = 7;
  HodlrReport rep = recover_hodlr_general(o, cfg);
  CHECK(rep.form.n == 128);
  CHECK(rep.form.logical_n == 100);
  CHECK(rep.form.offset == 14);
  CHECK(rel_err(A, rep.form) <= 1e-10);
  // The working-space form is zero outside the embedded range.
  Matrix full = hodlr_apply_full(rep.form, Matrix::Identity(128, 128));
  CHECK(full.topRows(14).norm() <= 1e-12 * A.norm());
  CHECK(full.bottomRows(14).norm() <= 1e-12 * A.norm());
  CHECK(full.leftCols(14).norm() <= 1e-12 * A.norm());
  CHECK(full.rightCols(14).norm() <= 1e-12 * A.norm());
}

TEST_CASE("reconstruction of empty, full and partial forms") {
  ref::Gen g(11);
  Matrix X = g.matrix(64, 3);
  CHECK(hodlr_reconstruct_apply(HodlrForm{}, X).norm() == 0.0);
  for (bool sym : {true, false}) {
    HodlrForm f = random_hodlr(64, 2, 12, sym);
    Matrix A = hodlr_materialize(f);
    CHECK((hodlr_reconstruct_apply(f, X) - A * X).norm() <= 1e-12 * (A * X).norm());
    CHECK((hodlr_reconstruct_apply(f, X, true) - A.transpose() * X).norm() <= 1e-12 * (A * X).norm());
    for (Index j = 0; j <= Index(f.levels.size()); ++j) {
      Matrix M = masked(A, f.leaf, j);
      CHECK((hodlr_reconstruct_apply(hodlr_truncate(f, j), X) - M * X).norm() <= 1e-12 * (A * X).norm());
    }
  }
}

TEST_CASE("ledger caps, blacklist bound and monotone residual over random instances") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    ref::Gen g(seed + 300);
    const Index logn = g.integer(5, 8), n = Index(1) << logn, k = g.integer(1, 2);
    const bool sym = seed % 3 != 0;
    HodlrForm f = random_hodlr(n, k, seed, sym);
    Matrix A = hodlr_materialize(f);
    Oracle o = Oracle::dense(A);
    HodlrConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    HodlrReport rep = sym ? recover_hodlr_symmetric(o, cfg) : recover_hodlr_general(o, cfg);
    CAPTURE(seed);
    CHECK(ref::rel_fro(A, hodlr_materialize(rep.form)) <= 1e-10);
    CHECK(o.ledger().total() <= (sym ? 6 * k + 10 : 10 * k + 20) * logn);
    CHECK(rep.blacklist_columns <= k * (rep.stop - 1) * (sym ? 1 : 2));
    double last = A.norm();
    for (Index j = 1; j <= Index(rep.form.levels.size()); ++j) {
      const double r = (A - hodlr_materialize(hodlr_truncate(rep.form, j))).norm();
      CHECK(r <= last * (1 + 1e-12));
      last = r;
    }
  }
}
