#include "mvr/hss.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace mvr {

Index UnknownBlock::count() const {
  if (kind == Kind::coupling) return left.cols() * right.cols();
  const Index r = left.cols();
  return r * (r + 1) / 2;
}

Index UnknownBlock::index(Index i, Index j) const {
  if (kind == Kind::coupling) return offset + i * right.cols() + j;
  if (i > j) std::swap(i, j);
  const Index r = left.cols();
  return offset + i * r - i * (i - 1) / 2 + (j - i);
}

void BlockLayout::add(UnknownBlock block) {
  if (block.left.rows() != block.rows.size) throw ShapeError("BlockLayout: left basis does not match rows");
  if (block.kind == UnknownBlock::Kind::coupling && block.right.rows() != block.cols.size)
    throw ShapeError("BlockLayout: right basis does not match cols");
  if (block.kind == UnknownBlock::Kind::symmetric_core) block.cols = block.rows;
  block.offset = unknowns;
  unknowns += block.count();
  blocks.push_back(std::move(block));
}

std::pair<Index, Index> BlockLayout::owner(Index unknown) const {
  if (unknown < 0 || unknown >= unknowns) throw ShapeError("BlockLayout::owner: index out of range");
  auto it = std::upper_bound(blocks.begin(), blocks.end(), unknown,
                             [](Index u, const UnknownBlock& b) { return u < b.offset; });
  // Skip back over empty blocks sharing the offset.
  while (it != blocks.begin()) {
    --it;
    if (it->count() > 0 && unknown < it->offset + it->count()) break;
  }
  return {Index(it - blocks.begin()), unknown - it->offset};
}

namespace {

// Orthogonal row bases per finest row segment; an empty Q means identity.
struct SegmentBases {
  std::vector<Index> cuts;  // segment s covers rows [cuts[s], cuts[s + 1])
  std::vector<Matrix> Q;
  std::vector<Index> rank;

  Index segment(Index row) const {
    return Index(std::upper_bound(cuts.begin(), cuts.end(), row) - cuts.begin()) - 1;
  }
  Index size(Index s) const { return cuts[s + 1] - cuts[s]; }
};

// Row ranges a block writes to, with the factor multiplying its core there.
template <typename F>
void for_each_row_factor(const UnknownBlock& b, F&& f) {
  f(b.rows, b.left, 0);
  if (b.kind == UnknownBlock::Kind::coupling && b.mirrored) f(b.cols, b.right, 1);
}

SegmentBases segment_bases(const BlockLayout& layout, bool compress) {
  SegmentBases sb;
  sb.cuts = {0, layout.n};
  for (const UnknownBlock& b : layout.blocks)
    for_each_row_factor(b, [&](Range r, const Matrix&, int) {
      sb.cuts.push_back(r.begin);
      sb.cuts.push_back(r.begin + r.size);
    });
  std::sort(sb.cuts.begin(), sb.cuts.end());
  sb.cuts.erase(std::unique(sb.cuts.begin(), sb.cuts.end()), sb.cuts.end());
  const Index segs = Index(sb.cuts.size()) - 1;
  sb.Q.assign(segs, Matrix());
  sb.rank.assign(segs, 0);
  if (!compress) return sb;

  std::vector<std::vector<Matrix>> parts(segs);
  for (const UnknownBlock& b : layout.blocks) {
    if (b.count() == 0) continue;
    for_each_row_factor(b, [&](Range r, const Matrix& F, int) {
      for (Index s = sb.segment(r.begin); s < segs && sb.cuts[s] < r.begin + r.size; ++s)
        if (F.cols() < sb.size(s)) parts[s].push_back(F.middleRows(sb.cuts[s] - r.begin, sb.size(s)));
    });
  }
  for (Index s = 0; s < segs; ++s) {
    if (parts[s].empty()) continue;
    Index width = 0;
    for (const Matrix& P : parts[s]) width += P.cols();
    Matrix M(sb.size(s), width);
    Index c = 0;
    for (const Matrix& P : parts[s]) {
      M.middleCols(c, P.cols()) = P;
      c += P.cols();
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(M);
    qr.setThreshold(1e-13);
    if (qr.rank() >= sb.size(s)) continue;
    sb.Q[s] = qr.householderQ();
    sb.rank[s] = qr.rank();
  }
  return sb;
}

// Q^T F segment by segment; low-rank factors lose the rows past the segment rank.
Matrix rotate_factor(const SegmentBases& sb, Range r, const Matrix& F) {
  Matrix out = F;
  const Index segs = Index(sb.cuts.size()) - 1;
  for (Index s = sb.segment(r.begin); s < segs && sb.cuts[s] < r.begin + r.size; ++s) {
    if (sb.Q[s].size() == 0) continue;
    auto part = out.middleRows(sb.cuts[s] - r.begin, sb.size(s));
    part = sb.Q[s].transpose() * Matrix(part);
    if (F.cols() < sb.size(s)) part.bottomRows(sb.size(s) - sb.rank[s]).setZero();
  }
  return out;
}

// Calls emit(row, col, value) for every nonzero of the system, in the rotated
// row basis given by the per-block row factors.
template <typename Emit>
void visit_entries(const BlockLayout& layout, const std::vector<Matrix>& row_left, const std::vector<Matrix>& row_right,
                   const Matrix& inputs, Emit&& emit) {
  const Index n = layout.n;
  auto push = [&](Index row, Index col, double v) {
    if (v != 0.0) emit(row, col, v);
  };
  for (Index q = 0; q < inputs.cols(); ++q) {
    const auto x = inputs.col(q);
    const Index base = q * n;
    for (size_t bi = 0; bi < layout.blocks.size(); ++bi) {
      const UnknownBlock& b = layout.blocks[bi];
      if (b.count() == 0) continue;
      const Matrix& L = row_left[bi];
      const Index a = b.left_rank();
      if (b.kind == UnknownBlock::Kind::coupling) {
        const Index c = b.right_rank();
        Vector t = b.right.transpose() * x.segment(b.cols.begin, b.cols.size);
        for (Index r = 0; r < b.rows.size; ++r)
          for (Index i = 0; i < a; ++i) {
            const double l = L(r, i);
            if (l == 0.0) continue;
            for (Index j = 0; j < c; ++j) push(base + b.rows.begin + r, b.offset + i * c + j, l * t(j));
          }
        if (b.mirrored) {
          const Matrix& Rr = row_right[bi];
          Vector u = b.left.transpose() * x.segment(b.rows.begin, b.rows.size);
          for (Index r = 0; r < b.cols.size; ++r)
            for (Index j = 0; j < c; ++j) {
              const double l = Rr(r, j);
              if (l == 0.0) continue;
              for (Index i = 0; i < a; ++i) push(base + b.cols.begin + r, b.offset + i * c + j, l * u(i));
            }
        }
      } else {
        Vector t = b.left.transpose() * x.segment(b.rows.begin, b.rows.size);
        for (Index r = 0; r < b.rows.size; ++r)
          for (Index i = 0; i < a; ++i)
            for (Index j = i; j < a; ++j) {
              double v = L(r, i) * t(j);
              if (j != i) v += L(r, j) * t(i);
              push(base + b.rows.begin + r, b.index(i, j), v);
            }
      }
    }
  }
}

}  // namespace

HssSystem assemble_hss_system(const BlockLayout& layout, const Matrix& inputs, const Matrix& rhs, RowBasis basis) {
  const Index n = layout.n;
  if (inputs.rows() != n || rhs.rows() != n || inputs.cols() != rhs.cols())
    throw ShapeError("assemble_hss_system: inputs and outputs must both be N x s");
  HssSystem sys;
  sys.layout = layout;
  sys.rows = n * inputs.cols();
  sys.cols = layout.unknowns;

  const SegmentBases sb = segment_bases(layout, basis == RowBasis::compressed);
  std::vector<Matrix> row_left(layout.blocks.size()), row_right(layout.blocks.size());
  for (size_t bi = 0; bi < layout.blocks.size(); ++bi)
    for_each_row_factor(layout.blocks[bi], [&](Range r, const Matrix& F, int side) {
      (side == 0 ? row_left : row_right)[bi] = rotate_factor(sb, r, F);
    });

  Matrix out = rhs;
  for (Index s = 0; s + 1 < Index(sb.cuts.size()); ++s)
    if (sb.Q[s].size() != 0) out.middleRows(sb.cuts[s], sb.size(s)) = sb.Q[s].transpose() * out.middleRows(sb.cuts[s], sb.size(s));
  sys.rhs = Eigen::Map<const Vector>(out.data(), out.size());

  // Two passes straight into compressed columns: count, then fill.
  std::vector<Index> start(sys.cols + 1, 0);
  visit_entries(layout, row_left, row_right, inputs, [&](Index, Index col, double) { ++start[col + 1]; });
  for (Index c = 0; c < sys.cols; ++c) start[c + 1] += start[c];
  const Index nnz = start[sys.cols];
  std::vector<Index> rows_of(nnz);
  std::vector<double> vals(nnz);
  std::vector<Index> next(start.begin(), start.end() - 1);
  visit_entries(layout, row_left, row_right, inputs, [&](Index row, Index col, double v) {
    rows_of[next[col]] = row;
    vals[next[col]++] = v;
  });

  // Sort each column by row and merge repeats.
  sys.matrix.resize(sys.rows, sys.cols);
  sys.matrix.resizeNonZeros(nnz);
  Index* outer = sys.matrix.outerIndexPtr();
  Index* inner = sys.matrix.innerIndexPtr();
  double* value = sys.matrix.valuePtr();
  std::vector<std::pair<Index, double>> col;
  Index w = 0;
  for (Index c = 0; c < sys.cols; ++c) {
    outer[c] = w;
    col.clear();
    for (Index e = start[c]; e < start[c + 1]; ++e) col.emplace_back(rows_of[e], vals[e]);
    if (!std::is_sorted(col.begin(), col.end(), [](auto& x, auto& y) { return x.first < y.first; }))
      std::stable_sort(col.begin(), col.end(), [](auto& x, auto& y) { return x.first < y.first; });
    for (const auto& [r, v] : col) {
      if (w > outer[c] && inner[w - 1] == r) {
        value[w - 1] += v;
      } else {
        inner[w] = r;
        value[w++] = v;
      }
    }
  }
  outer[sys.cols] = w;
  sys.matrix.resizeNonZeros(w);
  return sys;
}

namespace {

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), Index(0)); }
  Index find(Index a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void join(Index a, Index b) { parent[find(a)] = find(b); }
};

// Component label per column; rows inherit the label of any of their columns.
std::vector<Index> column_components(const HssSystem& sys, Index& count) {
  DisjointSets sets(sys.cols);
  std::vector<Index> first(sys.rows, -1);
  for (Index c = 0; c < sys.matrix.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(sys.matrix, c); it; ++it) {
      Index& f = first[it.row()];
      if (f < 0)
        f = c;
      else
        sets.join(c, f);
    }
  std::vector<Index> label(sys.cols, -1), root_label(sys.cols, -1);
  count = 0;
  for (Index c = 0; c < sys.cols; ++c) {
    Index r = sets.find(c);
    if (root_label[r] < 0) root_label[r] = count++;
    label[c] = root_label[r];
  }
  return label;
}

}  // namespace

Index hss_system_components(const HssSystem& sys) {
  Index count = 0;
  column_components(sys, count);
  return count;
}

HssSolution solve_hss_system(HssSystem sys, double rank_tol) {
  HssSolution sol;
  sol.params = Vector::Zero(sys.cols);
  if (sys.cols == 0) {
    sol.residual = sys.rhs.norm();
    return sol;
  }
  Index count = 0;
  std::vector<Index> label = column_components(sys, count);
  sol.components = count;

  std::vector<Index> local_col(sys.cols), comp_cols(count, 0);
  for (Index c = 0; c < sys.cols; ++c) local_col[c] = comp_cols[label[c]]++;

  std::vector<Index> row_comp(sys.rows, -1), local_row(sys.rows, -1), comp_rows(count, 0);
  for (Index c = 0; c < sys.cols; ++c)
    for (SparseMatrix::InnerIterator it(sys.matrix, c); it; ++it) row_comp[it.row()] = label[c];
  double residual2 = 0.0;
  for (Index r = 0; r < sys.rows; ++r) {
    if (row_comp[r] < 0)
      residual2 += sys.rhs(r) * sys.rhs(r);
    else
      local_row[r] = comp_rows[row_comp[r]]++;
  }

  std::vector<SparseMatrix> parts(count);
  std::vector<Vector> rhs(count);
  std::vector<std::vector<Index>> cols_of(count);
  for (Index c = 0; c < sys.cols; ++c) cols_of[label[c]].push_back(c);

  if (count == 1 && comp_rows[0] == sys.rows) {
    parts[0] = std::move(sys.matrix);
    rhs[0] = std::move(sys.rhs);
  } else {
    std::vector<Index> comp_nnz(count, 0);
    for (Index c = 0; c < sys.cols; ++c) comp_nnz[label[c]] += sys.matrix.col(c).nonZeros();
    for (Index k = 0; k < count; ++k) {
      SparseMatrix& P = parts[k];
      P.resize(comp_rows[k], comp_cols[k]);
      P.resizeNonZeros(comp_nnz[k]);
      Index w = 0;
      for (Index j = 0; j < comp_cols[k]; ++j) {
        P.outerIndexPtr()[j] = w;
        // local_row is increasing in the global row, so columns stay sorted.
        for (SparseMatrix::InnerIterator it(sys.matrix, cols_of[k][j]); it; ++it) {
          P.innerIndexPtr()[w] = local_row[it.row()];
          P.valuePtr()[w++] = it.value();
        }
      }
      P.outerIndexPtr()[comp_cols[k]] = w;
      rhs[k].resize(comp_rows[k]);
    }
    for (Index r = 0; r < sys.rows; ++r)
      if (row_comp[r] >= 0) rhs[row_comp[r]](local_row[r]) = sys.rhs(r);
    sys.matrix = SparseMatrix();
  }

  for (Index c = 0; c < count; ++c) {
    if (comp_rows[c] == 0)
      throw UnderDeterminedError("solve_hss_system: unknowns with no equations; add more queries");
    LsqResult part = sparse_lsq(std::move(parts[c]), rhs[c], rank_tol);
    for (Index j = 0; j < comp_cols[c]; ++j) sol.params(cols_of[c][j]) = part.x(j);
    residual2 += part.residual * part.residual;
  }
  sol.residual = std::sqrt(residual2);
  return sol;
}

void write_matrix_market(std::ostream& out, const HssSystem& sys) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << sys.rows << ' ' << sys.cols << ' ' << sys.matrix.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Index c = 0; c < sys.matrix.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(sys.matrix, c); it; ++it)
      out << it.row() + 1 << ' ' << c + 1 << ' ' << it.value() << '\n';
}

Matrix system_dense(const HssSystem& sys) { return Matrix(sys.matrix); }

Matrix block_core(const UnknownBlock& b, const Vector& params) {
  const Index a = b.left_rank(), c = b.right_rank();
  Matrix H(a, c);
  for (Index i = 0; i < a; ++i)
    for (Index j = 0; j < c; ++j) H(i, j) = params(b.index(i, j));
  return H;
}

Matrix restricted_apply(const RestrictedHssForm& f, const Matrix& X, bool transpose) {
  if (X.rows() != f.layout.n) throw ShapeError("restricted_apply: dimension mismatch");
  Matrix Y = Matrix::Zero(X.rows(), X.cols());
  for (const UnknownBlock& b : f.layout.blocks) {
    if (b.count() == 0) continue;
    Matrix H = block_core(b, f.params);
    const Matrix& right = b.kind == UnknownBlock::Kind::coupling ? b.right : b.left;
    // Forward: A(rows, cols) += left H right^T, plus the mirror A(cols, rows) += right H^T left^T.
    auto forward = [&](const Matrix& L, const Matrix& core, const Matrix& R, Range out, Range in) {
      Y.middleRows(out.begin, out.size).noalias() += L * (core * (R.transpose() * X.middleRows(in.begin, in.size)));
    };
    if (!transpose) {
      forward(b.left, H, right, b.rows, b.cols);
      if (b.mirrored) forward(right, H.transpose(), b.left, b.cols, b.rows);
    } else {
      forward(right, H.transpose(), b.left, b.cols, b.rows);
      if (b.mirrored) forward(b.left, H, right, b.rows, b.cols);
    }
  }
  return Y;
}

Matrix restricted_materialize(const RestrictedHssForm& f) {
  return restricted_apply(f, Matrix::Identity(f.layout.n, f.layout.n));
}

}  // namespace mvr
