#include "mvr/hodlr.hpp"

#include "mvr/numerics.hpp"
#include "mvr/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace mvr {

Index Blacklist::columns() const {
  Index c = 0;
  for (const Matrix& e : entries) c += e.cols();
  return c;
}

Matrix Blacklist::restrict(Range range) const {
  Matrix out(range.size, columns());
  Index c = 0;
  for (const Matrix& e : entries) {
    out.middleCols(c, e.cols()) = e.block(range.begin, 0, range.size, e.cols());
    c += e.cols();
  }
  return out;
}

Matrix Blacklist::basis(Range range) const { return orth(restrict(range), 1e-12); }

void Blacklist::add(Index entry, Range range, const Matrix& factor) {
  while (Index(entries.size()) <= entry) entries.emplace_back(Matrix::Zero(n, 0));
  Matrix& e = entries[entry];
  if (factor.cols() > e.cols()) {
    Matrix grown = Matrix::Zero(n, factor.cols());
    grown.leftCols(e.cols()) = e;
    e = std::move(grown);
  }
  e.block(range.begin, 0, range.size, factor.cols()) = factor;
}

Index stop_level(Index n_padded, Index k, Index p) {
  if (!is_power_of_two(n_padded)) throw ConfigError("stop_level: N must be a power of two");
  const Index n = log2_exact(n_padded);
  for (Index l = 1; l <= n; ++l)
    if ((Index(1) << (n - l)) - (l - 1) * k < k + p) return l;
  return n;
}

Matrix project_inputs(const Matrix& X, const Blacklist& bl, const std::vector<Range>& ranges) {
  Matrix out = X;
  for (const Range& r : ranges) {
    Matrix Q = bl.basis(r);
    if (Q.cols() == 0) continue;
    auto block = out.middleRows(r.begin, r.size);
    block -= Q * (Q.transpose() * block);
  }
  return out;
}

Matrix hodlr_reconstruct_apply(const HodlrForm& form, const Matrix& X, bool transpose) {
  if (form.n == 0) return Matrix::Zero(X.rows(), X.cols());
  return hodlr_apply(form, X, transpose);
}

namespace {

Matrix project_out(const Matrix& Q, const Matrix& M) {
  if (Q.cols() == 0) return M;
  return M - Q * (Q.transpose() * M);
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// Re-factor U V^T with the smallest inner dimension.
void compress(Matrix& U, Matrix& V) {
  if (U.cols() == 0) return;
  Eigen::HouseholderQR<Matrix> qu(U), qv(V);
  const Index cu = std::min(U.rows(), U.cols()), cv = std::min(V.rows(), V.cols());
  Matrix Qu = qu.householderQ() * Matrix::Identity(U.rows(), cu);
  Matrix Qv = qv.householderQ() * Matrix::Identity(V.rows(), cv);
  Matrix Ru = qu.matrixQR().topRows(cu).triangularView<Eigen::Upper>();
  Matrix Rv = qv.matrixQR().topRows(cv).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<Matrix> svd(Matrix(Ru * Rv.transpose()), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > 1e-15 * s(0)) ++r;
  U = Qu * svd.matrixU().leftCols(r) * s.head(r).asDiagonal();
  V = Qv * svd.matrixV().leftCols(r);
}

// Least squares D with D X = W for a short-wide X.
Matrix solve_right(const Matrix& X, const Matrix& W) {
  Eigen::ColPivHouseholderQR<Matrix> qr(X.transpose());
  return qr.solve(Matrix(W.transpose())).transpose();
}

struct ResidualBlock {
  Index level = 0, node = 0;
  bool upper = false;  // A(I1, I2) instead of A(I2, I1)
  Index leaf = -1;     // >= 0 for diagonal blocks
};

class HodlrEngine {
 public:
  HodlrEngine(const Oracle& oracle, const HodlrConfig& cfg, bool symmetric, Range active)
      : oracle_(oracle), cfg_(cfg), symmetric_(symmetric), active_(active), n_(oracle.dim()),
        rng_(cfg.seed, streams::hodlr) {
    if (!is_power_of_two(n_) || n_ < 2) throw ConfigError("hodlr: working size must be a power of two");
    if (cfg.k < 1 || cfg.p < 0) throw ConfigError("hodlr: need k >= 1 and p >= 0");
    bl_c_.n = bl_r_.n = n_;
  }

  HodlrReport run() {
    const QueryLedger start = oracle_.ledger();
    rep_.stop = stop_level(n_, cfg_.k, cfg_.p);
    HodlrForm& f = rep_.form;
    f.n = f.logical_n = n_;
    f.symmetric = symmetric_;
    f.leaf = n_ >> (rep_.stop - 1);
    for (Index l = 0; l + 1 < rep_.stop; ++l) level(l);
    leaves();
    residual_solve();
    rep_.blacklist_columns = std::max(bl_c_.columns(), symmetric_ ? 0 : bl_r_.columns());
    rep_.ledger = oracle_.ledger() - start;
    return std::move(rep_);
  }

 private:
  Blacklist& rows_bl() { return symmetric_ ? bl_c_ : bl_r_; }

  bool inactive(Range r) const {
    return r.end() <= active_.begin || r.begin >= active_.end();
  }

  void mask(Matrix& M, Range r) const {
    for (Index i = 0; i < M.rows(); ++i) {
      Index a = r.begin + i;
      if (a < active_.begin || a >= active_.end()) M.row(i).setZero();
    }
  }

  Matrix masked(Matrix M, Range r) const {
    mask(M, r);
    return M;
  }

  double tau(double input_norm) const { return cfg_.fail_scale * input_norm * a_est_; }

  // Range basis of an output block: empty when the block failed, otherwise
  // truncated at the rank cutoff on the same scale as tau.
  Matrix range_basis(const Matrix& S, double input_norm) const {
    if (S.norm() <= tau(input_norm)) return Matrix(S.rows(), 0);
    return leading_left_singular(S, cfg_.k, cfg_.rank_cutoff, cfg_.rank_cutoff * input_norm * a_est_);
  }

  void note_ambiguity(double out_norm, double input_norm, Index level, Index node, const char* side) {
    const double t = tau(input_norm);
    if (t > 0 && out_norm > 0.1 * t && out_norm < 10.0 * t) {
      std::ostringstream msg;
      msg << "level " << level + 1 << " node " << node << " " << side << ": output norm " << out_norm
          << " is within a factor 10 of the failure threshold " << t;
      rep_.warnings.push_back(msg.str());
    }
  }

  Matrix gaussian_on(const std::vector<Range>& ranges, const std::vector<bool>& use, Index width) {
    Matrix X = Matrix::Zero(n_, width);
    for (size_t j = 0; j < ranges.size(); ++j)
      if (use[j]) X.middleRows(ranges[j].begin, ranges[j].size) = masked(rng_.matrix(ranges[j].size, width), ranges[j]);
    return X;
  }

  // Range basis of a block from a projected forward sketch; returns the basis and the output norm.
  struct Sketch {
    Matrix Q;
    double out_norm = 0.0, in_norm = 0.0;
  };

  std::vector<Sketch> sketch_side(Index l, const std::vector<Range>& in, const std::vector<Range>& out,
                                  const std::vector<Matrix>& in_basis, const std::vector<bool>& use) {
    const Index nodes = Index(in.size());
    Matrix X = gaussian_on(in, use, cfg_.k + cfg_.p);
    std::vector<Sketch> res(nodes);
    // Scale by the raw draw: the projection may remove almost everything.
    for (Index j = 0; j < nodes; ++j)
      if (use[j]) {
        auto block = X.middleRows(in[j].begin, in[j].size);
        res[j].in_norm = block.norm();
        block = project_out(in_basis[j], block);
      }
    if (!std::any_of(use.begin(), use.end(), [](bool b) { return b; })) return res;
    Matrix O = oracle_.query(X);
    for (Index j = 0; j < nodes; ++j) {
      if (!use[j]) continue;
      res[j].out_norm = O.middleRows(out[j].begin, out[j].size).norm();
      if (res[j].in_norm > 0) a_est_ = std::max(a_est_, res[j].out_norm / res[j].in_norm);
    }
    for (Index j = 0; j < nodes; ++j) {
      if (!use[j]) continue;
      note_ambiguity(res[j].out_norm, res[j].in_norm, l, j, "projected output");
      Matrix S = O.middleRows(out[j].begin, out[j].size);
      res[j].Q = masked(range_basis(S, res[j].in_norm), out[j]);
    }
    return res;
  }

  // Batch with `inputs[j]` placed on `in[j]`; returns the outputs on `out[j]`.
  std::vector<Matrix> batch(const std::vector<Range>& in, const std::vector<Range>& out,
                            const std::vector<Matrix>& inputs, Index width, bool transpose) {
    std::vector<Matrix> res(in.size());
    Matrix X = Matrix::Zero(n_, width);
    bool any = false;
    for (size_t j = 0; j < in.size(); ++j)
      if (inputs[j].cols() > 0) {
        X.block(in[j].begin, 0, in[j].size, inputs[j].cols()) = inputs[j];
        any = true;
      }
    if (!any) return res;
    Matrix O = transpose ? oracle_.query_transpose(X) : oracle_.query(X);
    for (size_t j = 0; j < in.size(); ++j)
      if (inputs[j].cols() > 0) res[j] = O.block(out[j].begin, 0, out[j].size, inputs[j].cols());
    return res;
  }

  // Column factor from outputs of the projected range basis: returns false
  // when the Gram matrix is too close to singular.
  static bool divide_gram(const Matrix& Q, const Matrix& projected, const Matrix& out, Matrix& factor) {
    Matrix G = Q.transpose() * projected;
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
    if (eig.eigenvalues().minCoeff() <= 1e-12) return false;
    factor = Matrix(G.llt().solve(out.transpose())).transpose();
    return true;
  }

  void level(Index l) {
    const Index nodes = Index(1) << l;
    const Index s = n_ >> (l + 1);
    LevelPlan plan;
    plan.level = l + 1;
    plan.block_size = s;
    plan.status.assign(nodes, BlockStatus{});

    std::vector<Range> I1(nodes), I2(nodes);
    std::vector<Matrix> Qc1(nodes), Qc2(nodes), Qr1(nodes), Qr2(nodes);
    std::vector<bool> live(nodes);
    for (Index j = 0; j < nodes; ++j) {
      auto ch = hodlr_children(n_, l, j);
      I1[j] = ch.first;
      I2[j] = ch.second;
      Qc1[j] = bl_c_.basis(I1[j]);
      Qc2[j] = bl_c_.basis(I2[j]);
      Qr1[j] = rows_bl().basis(I1[j]);
      Qr2[j] = rows_bl().basis(I2[j]);
      live[j] = !inactive(I1[j]) && !inactive(I2[j]);
    }

    std::vector<HodlrNode>& out_nodes = rep_.form.levels.emplace_back(nodes);
    for (Index j = 0; j < nodes; ++j) {
      auto& nd = out_nodes[j];
      nd.U = Matrix(s, 0);
      nd.V = Matrix(s, 0);
      nd.W = Matrix(s, 0);
      nd.Z = Matrix(s, 0);
    }

    // Lower blocks A(I2, I1) from inputs on I1.
    std::vector<Sketch> lower = sketch_side(l, I1, I2, Qc1, live);
    std::vector<Sketch> upper;
    if (!symmetric_) upper = sketch_side(l, I2, I1, Qc2, live);

    std::vector<bool> need_lower(nodes, false), need_upper(nodes, false);
    const Index k = cfg_.k;

    if (symmetric_) {
      // y-batch on I2: projected range basis for isolated blocks, projected Gaussian otherwise.
      std::vector<Matrix> y(nodes);
      std::vector<double> y_norm(nodes, 0.0);
      for (Index j = 0; j < nodes; ++j) {
        if (!live[j]) continue;
        if (lower[j].Q.cols() == k) {
          y[j] = project_out(Qr2[j], lower[j].Q);
        } else {
          Matrix raw = masked(rng_.matrix(s, k), I2[j]);
          y_norm[j] = raw.norm();
          y[j] = project_out(Qr2[j], raw);
        }
      }
      std::vector<Matrix> o = batch(I2, I1, y, k, false);
      for (Index j = 0; j < nodes; ++j) {
        if (!live[j]) continue;
        BlockStatus& st = plan.status[j];
        st.lower = lower[j].Q.cols() == k;
        if (st.lower) {
          Matrix V;
          st.upper = divide_gram(lower[j].Q, y[j], o[j], V);
          if (st.upper) {
            out_nodes[j].U = lower[j].Q;
            out_nodes[j].V = masked(V, I1[j]);
          }
        } else {
          const double in_norm = y_norm[j];
          note_ambiguity(o[j].norm(), in_norm, l, j, "transpose-side output");
          st.upper = range_basis(o[j], in_norm).cols() == k;
        }
        need_lower[j] = !(st.lower && st.upper);
      }
    } else {
      std::vector<Matrix> t1(nodes), t2(nodes);
      for (Index j = 0; j < nodes; ++j) {
        if (!live[j]) continue;
        if (lower[j].Q.cols() == k) t1[j] = project_out(Qr2[j], lower[j].Q);
        if (upper[j].Q.cols() == k) t2[j] = project_out(Qr1[j], upper[j].Q);
      }
      std::vector<Matrix> o1 = batch(I2, I1, t1, k, true);
      std::vector<Matrix> o2 = batch(I1, I2, t2, k, true);
      for (Index j = 0; j < nodes; ++j) {
        if (!live[j]) continue;
        BlockStatus& st = plan.status[j];
        Matrix V, Z;
        st.lower = t1[j].cols() == k && divide_gram(lower[j].Q, t1[j], o1[j], V);
        st.upper = t2[j].cols() == k && divide_gram(upper[j].Q, t2[j], o2[j], Z);
        if (st.lower) {
          out_nodes[j].U = lower[j].Q;
          out_nodes[j].V = masked(V, I1[j]);
        }
        if (st.upper) {
          out_nodes[j].W = upper[j].Q;
          out_nodes[j].Z = masked(Z, I2[j]);
        }
        need_lower[j] = !st.lower;
        need_upper[j] = !st.upper;
      }
    }

    const bool any_fail = std::any_of(need_lower.begin(), need_lower.end(), [](bool b) { return b; }) ||
                          std::any_of(need_upper.begin(), need_upper.end(), [](bool b) { return b; });
    if (any_fail && cfg_.strict) {
      std::ostringstream msg;
      msg << "hodlr: level " << l + 1 << " has a block annihilated by the projected inputs";
      throw DegeneracyError(msg.str());
    }
    plan.output_pass = any_fail;

    // Output-projection pass for failed blocks, one side at a time.
    // side 0: M = A(I2, I1); side 1: K = A(I1, I2) (two-sided only).
    for (int side = 0; side < (symmetric_ ? 1 : 2); ++side) {
      const std::vector<bool>& need = side == 0 ? need_lower : need_upper;
      if (!std::any_of(need.begin(), need.end(), [](bool b) { return b; })) continue;
      const std::vector<Range>& in = side == 0 ? I1 : I2;
      const std::vector<Range>& out = side == 0 ? I2 : I1;
      const std::vector<Matrix>& Qin = side == 0 ? Qc1 : Qc2;     // column-side basis on the input range
      const std::vector<Matrix>& Qout = side == 0 ? Qr2 : Qr1;    // row-side basis on the output range
      const std::vector<Sketch>& sk = side == 0 ? lower : upper;

      // Raw range basis through the transpose: T = (I - P_in) M^T Q.
      std::vector<Matrix> q_in(nodes);
      for (Index j = 0; j < nodes; ++j)
        if (need[j]) q_in[j] = sk[j].Q;
      std::vector<Matrix> mt = batch(out, in, q_in, k, !symmetric_);
      // Raw Gaussian inputs, outputs projected on the row side.
      std::vector<bool> use(need.begin(), need.end());
      Matrix X = gaussian_on(in, use, k + cfg_.p);
      Matrix O = oracle_.query(X);

      for (Index j = 0; j < nodes; ++j) {
        if (!need[j]) continue;
        Matrix T = q_in[j].cols() > 0 ? masked(project_out(Qin[j], mt[j]), in[j]) : Matrix(in[j].size, 0);
        const double in_norm = X.middleRows(in[j].begin, in[j].size).norm();
        Matrix Qb = masked(range_basis(project_out(Qout[j], O.middleRows(out[j].begin, out[j].size)), in_norm), out[j]);
        HodlrNode& nd = out_nodes[j];
        if (side == 0) {
          nd.U = sk[j].Q;
          nd.V = T;
        } else {
          nd.W = sk[j].Q;
          nd.Z = T;
        }
        failed_.push_back({l, j, side == 1, -1});
        residual_left_.push_back(orth(hcat(Qout[j], Qb), 1e-12));
        residual_right_.push_back(Qin[j]);
        // Row/column spans of the whole block for deeper levels.
        bl_c_.add(2 * l + side, in[j], T.cols() ? orth(T, 1e-12) : T);
        rows_bl().add(2 * l + side, out[j], Qb);
      }
    }

    // Blacklist contributions of isolated blocks.
    for (Index j = 0; j < nodes; ++j) {
      if (!live[j]) continue;
      const HodlrNode& nd = out_nodes[j];
      if (!need_lower[j]) {
        bl_c_.add(2 * l, I1[j], orth(nd.V, 1e-12));
        rows_bl().add(2 * l, I2[j], nd.U);
      }
      if (!symmetric_ && !need_upper[j]) {
        bl_c_.add(2 * l + 1, I2[j], orth(nd.Z, 1e-12));
        rows_bl().add(2 * l + 1, I1[j], nd.W);
      }
    }
    if (symmetric_)
      for (auto& nd : out_nodes) {
        nd.W = nd.V;
        nd.Z = nd.U;
      }
    rep_.levels.push_back(std::move(plan));
  }

  bool leaf_has_residual(Index leaf) const {
    const Index w = rep_.stop;
    for (const ResidualBlock& b : failed_) {
      if (b.leaf >= 0) continue;
      if ((leaf >> (w - 1 - b.level)) == b.node) return true;
    }
    return false;
  }

  void leaves() {
    HodlrForm& f = rep_.form;
    const Index b = f.leaf, count = n_ / b;
    f.leaves.assign(count, Matrix::Zero(b, b));
    HodlrForm partial = f;
    partial.leaves.clear();

    auto residual_query = [&](const Matrix& X, bool transpose) -> Matrix {
      Matrix O = transpose ? oracle_.query_transpose(X) : oracle_.query(X);
      return O - hodlr_apply_full(partial, X, transpose);
    };

    std::vector<bool> flagged(count);
    bool any = false;
    for (Index i = 0; i < count; ++i) any |= (flagged[i] = leaf_has_residual(i));

    Matrix X = rng_.matrix(n_, b + cfg_.p);
    for (Index i = 0; i < count; ++i) mask_leaf_rows(X, i * b, b);
    Matrix W = residual_query(X, false);
    Matrix Y, Zt;
    if (any && !symmetric_) {
      Y = rng_.matrix(n_, b + cfg_.p);
      for (Index i = 0; i < count; ++i) mask_leaf_rows(Y, i * b, b);
      Zt = residual_query(Y, true);
    }

    for (Index i = 0; i < count; ++i) {
      const Range L{i * b, b};
      if (inactive(L)) continue;
      Matrix Xl = X.middleRows(L.begin, b), Wl = W.middleRows(L.begin, b);
      if (!flagged[i]) {
        Matrix D = masked(solve_right(Xl, Wl), L);
        D = masked(Matrix(D.transpose()), L).transpose();
        if (symmetric_) D = 0.5 * (D + D.transpose());
        f.leaves[i] = D;
        continue;
      }
      Matrix Qr = rows_bl().basis(L);
      Matrix K1 = masked(solve_right(Xl, project_out(Qr, Wl)), L);
      if (symmetric_) {
        f.leaves[i] = K1 + Matrix(K1 * Qr * Qr.transpose()).transpose();
        leaf_blocks_.push_back({i, Qr, Qr});
      } else {
        Matrix Qc = bl_c_.basis(L);
        Matrix K2 = solve_right(Y.middleRows(L.begin, b), project_out(Qc, Zt.middleRows(L.begin, b))).transpose();
        f.leaves[i] = K2 + K1 * Qc * Qc.transpose();
        leaf_blocks_.push_back({i, Qr, Qc});
      }
    }
  }

  void mask_leaf_rows(Matrix& X, Index begin, Index size) const {
    auto blk = X.middleRows(begin, size);
    Matrix tmp = blk;
    mask(tmp, {begin, size});
    blk = tmp;
  }

  void residual_solve() {
    BlockLayout layout;
    layout.n = n_;
    std::vector<ResidualBlock> owners;
    for (size_t t = 0; t < failed_.size(); ++t) {
      const ResidualBlock& rb = failed_[t];
      auto [I1, I2] = hodlr_children(n_, rb.level, rb.node);
      UnknownBlock ub;
      ub.rows = rb.upper ? I1 : I2;
      ub.cols = rb.upper ? I2 : I1;
      ub.left = residual_left_[t];
      ub.right = residual_right_[t];
      ub.mirrored = symmetric_;
      layout.add(ub);
      owners.push_back(rb);
    }
    for (const LeafBlock& lb : leaf_blocks_) {
      UnknownBlock ub;
      ub.rows = ub.cols = {lb.leaf * rep_.form.leaf, rep_.form.leaf};
      ub.left = lb.left;
      if (symmetric_) {
        ub.kind = UnknownBlock::Kind::symmetric_core;
      } else {
        ub.right = lb.right;
      }
      layout.add(ub);
      owners.push_back({0, 0, false, lb.leaf});
    }
    Index m = 0;
    for (const UnknownBlock& ub : layout.blocks) m = std::max({m, ub.left_rank(), ub.right_rank()});
    rep_.restricted_rank = m;
    if (layout.unknowns == 0) return;

    HodlrForm partial = rep_.form;
    Oracle residual(
        n_, [this, partial](const Matrix& X) -> Matrix { return oracle_.query(X) - hodlr_apply_full(partial, X); },
        [this, partial](const Matrix& X) -> Matrix {
          return oracle_.query_transpose(X) - hodlr_apply_full(partial, X, true);
        });
    rep_.restricted_queries = 2 * m;
    RestrictedReport rr = recover_restricted_hss(residual, layout, 2 * m, cfg_.seed ^ 0x5eedULL);
    rep_.restricted_residual = rr.residual;

    HodlrForm& f = rep_.form;
    for (size_t t = 0; t < owners.size(); ++t) {
      const UnknownBlock& ub = layout.blocks[t];
      if (ub.count() == 0) continue;
      Matrix H = block_core(ub, rr.form.params);
      const ResidualBlock& rb = owners[t];
      const Matrix& right = ub.kind == UnknownBlock::Kind::coupling ? ub.right : ub.left;
      if (rb.leaf >= 0) {
        f.leaves[rb.leaf] += ub.left * H * right.transpose();
        continue;
      }
      HodlrNode& nd = f.levels[rb.level][rb.node];
      if (!rb.upper) {
        nd.U = hcat(nd.U, ub.left * H);
        nd.V = hcat(nd.V, right);
        compress(nd.U, nd.V);
        if (symmetric_) {
          nd.W = nd.V;
          nd.Z = nd.U;
        }
      } else {
        nd.W = hcat(nd.W, ub.left * H);
        nd.Z = hcat(nd.Z, right);
        compress(nd.W, nd.Z);
      }
    }
  }

  struct LeafBlock {
    Index leaf;
    Matrix left, right;
  };

  const Oracle& oracle_;
  HodlrConfig cfg_;
  bool symmetric_;
  Range active_;
  Index n_;
  GaussianStream rng_;
  Blacklist bl_c_, bl_r_;
  double a_est_ = 0.0;
  HodlrReport rep_;
  std::vector<ResidualBlock> failed_;
  std::vector<Matrix> residual_left_, residual_right_;
  std::vector<LeafBlock> leaf_blocks_;
};

}  // namespace

HodlrReport recover_hodlr_generic_rank1(const Oracle& oracle, Index p, std::uint64_t seed) {
  HodlrConfig cfg;
  cfg.k = 1;
  cfg.p = p;
  cfg.seed = seed;
  cfg.strict = true;
  return HodlrEngine(oracle, cfg, true, {0, oracle.dim()}).run();
}

HodlrReport recover_hodlr_symmetric(const Oracle& oracle, const HodlrConfig& cfg) {
  return HodlrEngine(oracle, cfg, true, {0, oracle.dim()}).run();
}

HodlrReport recover_hodlr_general(const Oracle& oracle, const HodlrConfig& cfg) {
  const Index n = oracle.dim();
  const Index padded_n = Index(1) << log2_exact(std::max<Index>(n, 2));
  const Index offset = padding_offset(n, padded_n);
  Oracle padded = padded_n == n ? oracle : padded_oracle(oracle, padded_n, offset);
  HodlrReport rep = HodlrEngine(padded, cfg, false, {offset, n}).run();
  rep.form.logical_n = n;
  rep.form.offset = offset;
  return rep;
}

}  // namespace mvr
