#pragma once

#include "mvr/lowrank.hpp"
#include "mvr/numerics.hpp"
#include "mvr/oracle.hpp"
#include "mvr/structured.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace mvr {

// One block of unknowns in a linearly parametrized matrix.
//   coupling:        A(rows, cols) += left * H * right^T, H row-major
//                    (mirrored adds the transpose at (cols, rows));
//   symmetric_core:  A(rows, rows) += left * S * left^T, S symmetric,
//                    upper triangle stored row-major.
struct UnknownBlock {
  enum class Kind { coupling, symmetric_core };
  Kind kind = Kind::coupling;
  Range rows;
  Range cols;
  Matrix left;
  Matrix right;
  bool mirrored = false;
  Index offset = 0;  // first unknown

  Index left_rank() const { return left.cols(); }
  Index right_rank() const { return kind == Kind::coupling ? right.cols() : left.cols(); }
  Index count() const;
  // Unknown index of core entry (i, j); symmetric cores accept either order.
  Index index(Index i, Index j) const;
};

struct BlockLayout {
  Index n = 0;
  Index unknowns = 0;
  std::vector<UnknownBlock> blocks;

  // Appends a block, assigning its offset. Empty cores are kept with no unknowns.
  void add(UnknownBlock block);
  // (block id, position inside the block) for an unknown index.
  std::pair<Index, Index> owner(Index unknown) const;
};

// Assembled least-squares system, query-major rows: row q * N + i holds
// output entry i of query q (canonical row basis).
struct HssSystem {
  Index rows = 0;
  Index cols = 0;
  SparseMatrix matrix;
  Vector rhs;
  BlockLayout layout;
};

// compressed: within every query, the rows of each finest row segment are
// rotated by an orthogonal basis whose leading columns span the low-rank
// factors touching that segment; rows past that span drop every low-rank
// unknown. The least-squares solution and residual are unchanged.
enum class RowBasis { canonical, compressed };

HssSystem assemble_hss_system(const BlockLayout& layout, const Matrix& inputs, const Matrix& rhs,
                              RowBasis basis = RowBasis::canonical);

// Connected components of the bipartite row/column graph (nonzero entries only).
Index hss_system_components(const HssSystem& sys);

struct HssSolution {
  Vector params;
  double residual = 0.0;
  Index components = 0;
};

// Solves each decoupled component by sparse QR least squares.
HssSolution solve_hss_system(HssSystem sys, double rank_tol = 1e-10);

void write_matrix_market(std::ostream& out, const HssSystem& sys);
Matrix system_dense(const HssSystem& sys);

// Layout + parameters: a linearly parametrized matrix in block form.
struct RestrictedHssForm {
  BlockLayout layout;
  Vector params;
};

Matrix restricted_apply(const RestrictedHssForm& form, const Matrix& X, bool transpose = false);
Matrix restricted_materialize(const RestrictedHssForm& form);
// Core matrix of one block (dense, symmetric cores filled in both triangles).
Matrix block_core(const UnknownBlock& block, const Vector& params);

struct HssFactors {
  Matrix U, V, W, Z;
};

// Half-zero-padded sketches of the top off-diagonal blocks.
// Symmetric: 2k + p forward; general: 2(k + p) forward, 2k transpose.
HssFactors recover_top_factors(const Oracle& oracle, const SketchConfig& cfg, bool symmetric);

// Unknown layout of an HSS matrix whose top factors are known: couplings in
// depth-first order, then leaves.
BlockLayout hss_layout(Index n, Index leaf, const HssFactors& factors, bool symmetric);
HssForm hss_from_solution(Index n, Index k, Index leaf, const HssFactors& factors, bool symmetric,
                          const BlockLayout& layout, const Vector& params);

enum class SystemQueryRule {
  capped,   // 3k symmetric, 4k general
  minimal,  // ceil(unknowns / N)
};

struct HssConfig {
  SketchConfig sketch;
  SystemQueryRule rule = SystemQueryRule::capped;
  std::optional<Index> system_queries;  // overrides the rule
  double rank_tol = 1e-10;
};

struct HssReport {
  HssForm form;
  Index system_queries = 0;
  double residual = 0.0;
  Index components = 0;
  double solve_ms = 0.0;  // assembly plus sparse solve
};

Index hss_system_query_count(Index n, Index k, bool symmetric, SystemQueryRule rule);

HssReport recover_hss(const Oracle& oracle, const HssConfig& cfg, bool symmetric);

struct RestrictedReport {
  RestrictedHssForm form;
  double residual = 0.0;
};

// Gaussian forward sketch of `queries` columns against a matrix known to lie
// in the span of the layout; default budget 2 * m_rank.
RestrictedReport recover_restricted_hss(const Oracle& oracle, const BlockLayout& layout, Index queries,
                                        std::uint64_t seed, double rank_tol = 1e-10);

}  // namespace mvr
