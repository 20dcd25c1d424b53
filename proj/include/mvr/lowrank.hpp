#pragma once

#include "mvr/oracle.hpp"
#include "mvr/structured.hpp"

#include <string>
#include <vector>

namespace mvr {

struct SketchConfig {
  Index k = 1;
  Index p = 5;
  std::uint64_t seed = 0;
};

// Randomized range finder plus one transpose pass: A ~ Q (A^T Q)^T.
// Always spends (k + p, k) queries; unused basis slots are zero probes.
LowRankForm rsvd_recover(const Oracle& oracle, const SketchConfig& cfg, double cutoff = 1e-12);

// Y (X^T Y)^+ Y^T from one forward sketch of a symmetric matrix.
LowRankForm nystrom_recover_symmetric(const Oracle& oracle, const SketchConfig& cfg);

// Rotated bases of col(X) and col(W): the first p (q) columns of Xr (Wr) are
// not annihilated by A (A^T), the rest are.
struct WitnessSplit {
  Matrix Xt, Xh, Wt, Wh;  // tilde and hat parts
  Matrix Yt, Zt;          // A Xt, A^T Wt
  Index p = 0, q = 0;
};

WitnessSplit split_witness_inputs(const Matrix& X, const Matrix& W, const Matrix& A);

// Member of the two-sided family [Yt Wt] M(C) [Xt^T; Zt^T].
Matrix witness_family_member(const WitnessSplit& s, const Matrix& C);

struct Witness {
  Matrix B;
  std::string construction;
};

// B != A with B X = A X, B^T W = A^T W and rank(B) <= k.
Witness witness_lowrank(const Matrix& X, const Matrix& W, const Matrix& A, Index k);
// B = A + v v^T with v spanning null(X^T).
Witness witness_symmetric(const Matrix& A, const Matrix& X);
// B = A (I - 2 v v^T) with v spanning null(X^T).
Witness witness_orthogonal(const Matrix& A, const Matrix& X);

struct Certificate {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

std::vector<Certificate> certify_lowrank(const Matrix& X, const Matrix& W, const Matrix& A, Index k, const Matrix& B);
std::vector<Certificate> certify_symmetric(const Matrix& A, const Matrix& X, const Matrix& B);
std::vector<Certificate> certify_orthogonal(const Matrix& A, const Matrix& X, const Matrix& B);

}  // namespace mvr
