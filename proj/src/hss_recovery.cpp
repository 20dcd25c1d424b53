#include "mvr/hss.hpp"

#include "mvr/random.hpp"

#include <chrono>

namespace mvr {

namespace {

void check_hss_size(Index n, Index k) {
  if (!is_power_of_two(n) || n < 4) throw ConfigError("hss: N must be a power of two, at least 4");
  if (k < 1 || k > n / 2) throw ConfigError("hss: rank must lie in [1, N/2]");
}

// Queries [X; 0] (lower) or [0; X] (upper) and returns the opposite half of the output.
Matrix half_query(const Oracle& oracle, const Matrix& X, bool input_upper, bool transpose) {
  const Index h = oracle.dim() / 2;
  Matrix in = Matrix::Zero(2 * h, X.cols());
  in.middleRows(input_upper ? 0 : h, h) = X;
  Matrix out = transpose ? oracle.query_transpose(in) : oracle.query(in);
  return out.middleRows(input_upper ? h : 0, h);
}

// Range basis of the block hit by [X; 0] or [0; X], then its transpose action.
std::pair<Matrix, Matrix> sketch_block(const Oracle& oracle, GaussianStream& g, const SketchConfig& cfg,
                                       bool input_upper, bool transpose_available) {
  const Index h = oracle.dim() / 2;
  Matrix Y = half_query(oracle, g.matrix(h, cfg.k + cfg.p), input_upper, false);
  Matrix Q = leading_left_singular(Y, cfg.k, 1e-12);
  Matrix probes = Matrix::Zero(h, cfg.k);
  probes.leftCols(Q.cols()) = Q;
  // The block's transpose maps output-half vectors back to the input half.
  Matrix B = transpose_available ? half_query(oracle, probes, !input_upper, true)
                                 : half_query(oracle, probes, !input_upper, false);
  return {Q, B.leftCols(Q.cols())};
}

}  // namespace

HssFactors recover_top_factors(const Oracle& oracle, const SketchConfig& cfg, bool symmetric) {
  const Index n = oracle.dim();
  check_hss_size(n, cfg.k);
  GaussianStream g(cfg.seed, substream(streams::hss, 1));
  HssFactors f;
  // A(lower, upper) = U V^T is hit by [X; 0].
  std::tie(f.U, f.V) = sketch_block(oracle, g, cfg, true, !symmetric);
  if (symmetric) {
    f.W = f.V;
    f.Z = f.U;
  } else {
    std::tie(f.W, f.Z) = sketch_block(oracle, g, cfg, false, true);
  }
  return f;
}

BlockLayout hss_layout(Index n, Index leaf, const HssFactors& fac, bool symmetric) {
  BlockLayout layout;
  layout.n = n;
  const Index h = n / 2;
  for (const HssNode& nd : hss_nodes(n, leaf)) {
    const Matrix& R = nd.half == 0 ? fac.W : fac.U;
    const Matrix& C = nd.half == 0 ? fac.V : fac.Z;
    const Index off = nd.half == 0 ? 0 : h;
    const Index s = nd.size / 2;
    const Index c1 = nd.begin, c2 = nd.begin + s;
    UnknownBlock b;
    b.rows = {off + c1, s};
    b.cols = {off + c2, s};
    b.left = R.middleRows(c1, s);
    b.right = C.middleRows(c2, s);
    b.mirrored = symmetric;
    layout.add(b);
    if (!symmetric) {
      UnknownBlock t;
      t.rows = {off + c2, s};
      t.cols = {off + c1, s};
      t.left = R.middleRows(c2, s);
      t.right = C.middleRows(c1, s);
      layout.add(t);
    }
  }
  for (Index i = 0; i < n / leaf; ++i) {
    UnknownBlock d;
    d.kind = symmetric ? UnknownBlock::Kind::symmetric_core : UnknownBlock::Kind::coupling;
    d.rows = d.cols = {i * leaf, leaf};
    d.left = Matrix::Identity(leaf, leaf);
    if (!symmetric) d.right = d.left;
    layout.add(d);
  }
  return layout;
}

HssForm hss_from_solution(Index n, Index k, Index leaf, const HssFactors& fac, bool symmetric,
                          const BlockLayout& layout, const Vector& params) {
  HssForm f;
  f.n = n;
  f.rank = k;
  f.leaf = leaf;
  f.symmetric = symmetric;
  f.U = fac.U;
  f.V = fac.V;
  f.W = symmetric ? fac.V : fac.W;
  f.Z = symmetric ? fac.U : fac.Z;
  size_t b = 0;
  const size_t nodes = hss_nodes(n, leaf).size();
  for (size_t i = 0; i < nodes; ++i) {
    Matrix h12 = block_core(layout.blocks[b++], params);
    Matrix h21 = symmetric ? Matrix(h12.transpose()) : block_core(layout.blocks[b++], params);
    f.h12.push_back(std::move(h12));
    f.h21.push_back(std::move(h21));
  }
  for (Index i = 0; i < n / leaf; ++i) f.leaves.push_back(block_core(layout.blocks[b++], params));
  return f;
}

Index hss_system_query_count(Index n, Index k, bool symmetric, SystemQueryRule rule) {
  check_hss_size(n, k);
  if (rule == SystemQueryRule::capped) return symmetric ? 3 * k : 4 * k;
  const Index two_ell = Index(1) << hss_leaf_exponent(k);
  // Unknowns per N, evaluated in integers with a full-size diagonal block count.
  Index numerator = symmetric ? k * k * (n / two_ell) - 2 * k * k + two_ell * n
                              : k * k * (2 * n / two_ell) - 4 * k * k + two_ell * n;
  return std::max<Index>(1, (numerator + n - 1) / n);
}

HssReport recover_hss(const Oracle& oracle, const HssConfig& cfg, bool symmetric) {
  const Index n = oracle.dim();
  const Index k = cfg.sketch.k;
  check_hss_size(n, k);
  const Index leaf = hss_leaf_size(n, k);
  HssFactors fac = recover_top_factors(oracle, cfg.sketch, symmetric);

  HssReport rep;
  rep.system_queries = cfg.system_queries ? *cfg.system_queries : hss_system_query_count(n, k, symmetric, cfg.rule);
  if (rep.system_queries < 1) throw ConfigError("recover_hss: need at least one system query");
  GaussianStream g(cfg.sketch.seed, substream(streams::hss, 2));
  Matrix X = g.matrix(n, rep.system_queries);
  Matrix out = oracle.query(X);

  // Subtract the known top-level contribution.
  const Index h = n / 2;
  out.topRows(h) -= fac.W * (fac.Z.transpose() * X.bottomRows(h));
  out.bottomRows(h) -= fac.U * (fac.V.transpose() * X.topRows(h));

  BlockLayout layout = hss_layout(n, leaf, fac, symmetric);
  const auto t0 = std::chrono::steady_clock::now();
  HssSolution sol = solve_hss_system(assemble_hss_system(layout, X, out, RowBasis::compressed), cfg.rank_tol);
  rep.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rep.residual = sol.residual;
  rep.components = sol.components;
  rep.form = hss_from_solution(n, k, leaf, fac, symmetric, layout, sol.params);
  return rep;
}

RestrictedReport recover_restricted_hss(const Oracle& oracle, const BlockLayout& layout, Index queries,
                                        std::uint64_t seed, double rank_tol) {
  if (layout.n != oracle.dim()) throw ShapeError("recover_restricted_hss: layout size does not match oracle");
  RestrictedReport rep;
  rep.form.layout = layout;
  rep.form.params = Vector::Zero(layout.unknowns);
  if (queries <= 0 || layout.unknowns == 0) return rep;
  GaussianStream g(seed, substream(streams::hss, 3));
  Matrix X = g.matrix(layout.n, queries);
  Matrix out = oracle.query(X);
  HssSolution sol = solve_hss_system(assemble_hss_system(layout, X, out, RowBasis::compressed), rank_tol);
  rep.form.params = sol.params;
  rep.residual = sol.residual;
  return rep;
}

}  // namespace mvr
