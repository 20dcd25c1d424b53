#pragma once

#include "mvr/hss.hpp"
#include "mvr/oracle.hpp"
#include "mvr/structured.hpp"

#include <string>
#include <vector>

namespace mvr {

// Accumulated factor columns. Each entry is an N-row matrix whose rows on a
// range hold the factor restricted to that range (zero elsewhere).
struct Blacklist {
  Index n = 0;
  std::vector<Matrix> entries;

  Index columns() const;
  // Stacked entries restricted to the range.
  Matrix restrict(Range range) const;
  // Orthonormal basis of the restriction (cutoff 1e-12).
  Matrix basis(Range range) const;
  // Adds `factor` on `range`; each level's contributions share one entry.
  void add(Index entry, Range range, const Matrix& factor);
};

// Smallest level l >= 1 with 2^(n - l) - (l - 1) k < k + p, capped at n.
Index stop_level(Index n_padded, Index k, Index p);

// X(range) <- (I - Q Q^T) X(range) for each range, Q = basis of the blacklist there.
Matrix project_inputs(const Matrix& X, const Blacklist& blacklist, const std::vector<Range>& ranges);

struct BlockStatus {
  bool lower = true;  // A(I2, I1) isolated by projected inputs
  bool upper = true;  // A(I1, I2)
};

struct LevelPlan {
  Index level = 0;       // 1-based, level 1 splits the whole matrix
  Index block_size = 0;  // size of each child range
  std::vector<BlockStatus> status;
  bool output_pass = false;
};

struct HodlrConfig {
  Index k = 1;
  Index p = 5;
  std::uint64_t seed = 0;
  // Relative singular value cutoff for counting a block's isolated rank.
  double rank_cutoff = 1e-14;
  // A block fails when its output norm is below fail_scale * |input| * |A| estimate.
  double fail_scale = 1e-8;
  bool strict = false;  // throw DegeneracyError instead of running the output pass
};

struct HodlrReport {
  HodlrForm form;
  std::vector<LevelPlan> levels;
  Index stop = 0;
  Index blacklist_columns = 0;
  Index restricted_rank = 0;  // m_bl used for the residual solve
  Index restricted_queries = 0;
  double restricted_residual = 0.0;
  QueryLedger ledger;
  std::vector<std::string> warnings;
};

// Generic symmetric rank-1 path: the same level recursion with p + 1 wide
// sketches; any failed block raises DegeneracyError.
HodlrReport recover_hodlr_generic_rank1(const Oracle& oracle, Index p, std::uint64_t seed);

// Symmetric rank-k recovery on N = 2^n.
HodlrReport recover_hodlr_symmetric(const Oracle& oracle, const HodlrConfig& cfg);

// Two-sided recovery for any N through a centred zero embedding.
HodlrReport recover_hodlr_general(const Oracle& oracle, const HodlrConfig& cfg);

// Action of a (possibly partial) form.
Matrix hodlr_reconstruct_apply(const HodlrForm& form, const Matrix& X, bool transpose = false);

}  // namespace mvr
