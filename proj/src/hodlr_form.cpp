#include "internal.hpp"
#include "mvr/structured.hpp"

namespace mvr {

HodlrChildren hodlr_children(Index n, Index level, Index node) {
  const Index s = n >> (level + 1);
  const Index base = node * 2 * s;
  return {{base, s}, {base + s, s}};
}

Matrix hodlr_apply_full(const HodlrForm& f, const Matrix& X, bool transpose) {
  if (X.rows() != f.n) throw ShapeError("hodlr_apply: dimension mismatch");
  Matrix Y = Matrix::Zero(f.n, X.cols());
  for (Index l = 0; l < Index(f.levels.size()); ++l) {
    for (Index j = 0; j < Index(f.levels[l].size()); ++j) {
      const HodlrNode& nd = f.levels[l][j];
      auto [I1, I2] = hodlr_children(f.n, l, j);
      const Matrix& lower_left = transpose ? nd.V : nd.U;
      const Matrix& lower_right = transpose ? nd.U : nd.V;
      const Matrix& upper_left = transpose ? nd.Z : nd.W;
      const Matrix& upper_right = transpose ? nd.W : nd.Z;
      // Forward: y(I2) += U V^T x(I1), y(I1) += W Z^T x(I2).
      // Transpose: y(I1) += V U^T x(I2), y(I2) += Z W^T x(I1).
      Range out_ll = transpose ? I1 : I2, in_ll = transpose ? I2 : I1;
      Range out_ur = transpose ? I2 : I1, in_ur = transpose ? I1 : I2;
      if (lower_left.cols() > 0)
        Y.middleRows(out_ll.begin, out_ll.size).noalias() +=
            lower_left * (lower_right.transpose() * X.middleRows(in_ll.begin, in_ll.size));
      if (upper_left.cols() > 0)
        Y.middleRows(out_ur.begin, out_ur.size).noalias() +=
            upper_left * (upper_right.transpose() * X.middleRows(in_ur.begin, in_ur.size));
    }
  }
  for (Index i = 0; i < Index(f.leaves.size()); ++i) {
    const Matrix& D = f.leaves[i];
    if (D.size() == 0) continue;
    const Index b = i * f.leaf;
    if (transpose)
      Y.middleRows(b, f.leaf).noalias() += D.transpose() * X.middleRows(b, f.leaf);
    else
      Y.middleRows(b, f.leaf).noalias() += D * X.middleRows(b, f.leaf);
  }
  return Y;
}

Matrix hodlr_apply(const HodlrForm& f, const Matrix& X, bool transpose) {
  if (f.logical_n == f.n) return hodlr_apply_full(f, X, transpose);
  if (X.rows() != f.logical_n) throw ShapeError("hodlr_apply: dimension mismatch");
  Matrix Xp = Matrix::Zero(f.n, X.cols());
  Xp.middleRows(f.offset, f.logical_n) = X;
  return hodlr_apply_full(f, Xp, transpose).middleRows(f.offset, f.logical_n);
}

Matrix hodlr_materialize(const HodlrForm& f) {
  Matrix A = Matrix::Zero(f.n, f.n);
  for (Index l = 0; l < Index(f.levels.size()); ++l)
    for (Index j = 0; j < Index(f.levels[l].size()); ++j) {
      const HodlrNode& nd = f.levels[l][j];
      auto [I1, I2] = hodlr_children(f.n, l, j);
      if (nd.U.cols() > 0) A.block(I2.begin, I1.begin, I2.size, I1.size) = nd.U * nd.V.transpose();
      if (nd.W.cols() > 0) A.block(I1.begin, I2.begin, I1.size, I2.size) = nd.W * nd.Z.transpose();
    }
  for (Index i = 0; i < Index(f.leaves.size()); ++i)
    if (f.leaves[i].size() > 0) A.block(i * f.leaf, i * f.leaf, f.leaf, f.leaf) = f.leaves[i];
  return A.block(f.offset, f.offset, f.logical_n, f.logical_n);
}

HodlrForm hodlr_truncate(const HodlrForm& f, Index levels) {
  HodlrForm out = f;
  out.levels.resize(std::min<Index>(levels, f.levels.size()));
  out.leaves.clear();
  return out;
}

HodlrForm random_hodlr(Index n, Index k, std::uint64_t seed, bool symmetric, std::optional<double> decay) {
  if (n < 2) throw ConfigError("hodlr: N must be at least 2");
  if (k <= 0) throw ConfigError("hodlr: rank must be positive");
  if (decay && !(*decay > 0.0 && *decay < 1.0)) throw ConfigError("decay rate must lie in (0, 1)");
  GaussianStream g(seed, substream(streams::generator, std::uint64_t(FormKind::hodlr)));
  HodlrForm f;
  f.n = Index(1) << log2_exact(n);
  f.logical_n = n;
  f.offset = padding_offset(n, f.n);
  f.symmetric = symmetric;
  f.leaf = hss_leaf_size(f.n, k);
  if (f.leaf < 1) f.leaf = 1;
  const Index depth = log2_exact(f.n / f.leaf);

  for (Index l = 0; l < depth; ++l) {
    const Index s = f.n >> (l + 1);
    if (k > s) throw ConfigError("hodlr: rank exceeds block size");
    std::vector<HodlrNode> nodes;
    for (Index j = 0; j < (Index(1) << l); ++j) {
      HodlrNode nd;
      if (decay) {
        const Index r = decay_width(s, k);
        std::tie(nd.U, nd.V) = decay_factor_pair(g, s, s, r, *decay);
        if (!symmetric) std::tie(nd.W, nd.Z) = decay_factor_pair(g, s, s, r, *decay);
      } else {
        nd.U = g.matrix(s, k);
        nd.V = g.matrix(s, k);
        if (!symmetric) {
          nd.W = g.matrix(s, k);
          nd.Z = g.matrix(s, k);
        }
      }
      if (symmetric) {
        nd.W = nd.V;
        nd.Z = nd.U;
      }
      nodes.push_back(std::move(nd));
    }
    f.levels.push_back(std::move(nodes));
  }
  for (Index i = 0; i < f.n / f.leaf; ++i) f.leaves.push_back(symmetric ? g.symmetric(f.leaf) : g.matrix(f.leaf, f.leaf));

  if (f.logical_n != f.n) {
    // Zero every row/column outside the embedded range.
    auto mask = [&](Matrix& M, Index first_row) {
      for (Index i = 0; i < M.rows(); ++i) {
        Index a = first_row + i;
        if (a < f.offset || a >= f.offset + f.logical_n) M.row(i).setZero();
      }
    };
    for (Index l = 0; l < depth; ++l)
      for (Index j = 0; j < Index(f.levels[l].size()); ++j) {
        auto [I1, I2] = hodlr_children(f.n, l, j);
        HodlrNode& nd = f.levels[l][j];
        mask(nd.U, I2.begin);
        mask(nd.V, I1.begin);
        mask(nd.W, I1.begin);
        mask(nd.Z, I2.begin);
      }
    for (Index i = 0; i < Index(f.leaves.size()); ++i) {
      Matrix& D = f.leaves[i];
      mask(D, i * f.leaf);
      Matrix Dt = D.transpose();
      mask(Dt, i * f.leaf);
      D = Dt.transpose();
    }
  }
  return f;
}

}  // namespace mvr
