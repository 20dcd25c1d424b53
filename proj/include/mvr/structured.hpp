#pragma once

#include "mvr/oracle.hpp"
#include "mvr/types.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mvr {

struct DiagonalForm {
  Vector d;
};

struct TridiagonalForm {
  Vector main;
  Vector sub;    // A(i+1, i)
  Vector super;  // A(i, i+1)
  bool symmetric = false;
};

struct CirculantForm {
  Vector c;  // first column
};

struct ToeplitzForm {
  Vector t1;  // first column
  Vector t2;  // first row, t2[0] == t1[0]
};

struct HankelForm {
  Vector h;  // A(i, j) = h[i + j]
};

// Z_1 A - A Z_{-1} = G H^T, with the solution kept densely.
struct DisplacementForm {
  Matrix G;
  Matrix H;
  Matrix dense;
};

struct LowRankForm {
  Matrix U;
  Matrix V;  // A = U V^T
};

struct DenseForm {
  Matrix A;
};

// Two-level-split hierarchical form with nested bases.
//   A(lower, upper) = U V^T,  A(upper, lower) = W Z^T.
// Inside the upper half every node with children (c1, c2) has
//   A(c1, c2) = W(c1) h12 V(c2)^T,  A(c2, c1) = W(c2) h21 V(c1)^T,
// and inside the lower half the row basis is U and the column basis Z.
// Symmetric forms keep W = V, Z = U and h21 = h12^T.
struct HssForm {
  Index n = 0;
  Index rank = 0;
  Index leaf = 0;
  bool symmetric = false;
  Matrix U, V, W, Z;
  std::vector<Matrix> h12, h21;
  std::vector<Matrix> leaves;
};

struct HssNode {
  int half = 0;     // 0 upper, 1 lower
  Index begin = 0;  // relative to the half
  Index size = 0;
};

// Internal nodes in depth-first preorder, upper half first.
std::vector<HssNode> hss_nodes(Index n, Index leaf);
// Smallest power of two greater than k.
Index hss_leaf_exponent(Index k);
Index hss_leaf_size(Index n, Index k);
Index hss_parameter_count(Index n, Index k, bool symmetric);
// Number of free parameters stored in a form.
Index hss_free_parameters(const HssForm& form);

Matrix hss_apply(const HssForm& form, const Matrix& X, bool transpose = false);
Matrix hss_materialize(const HssForm& form);

// A(I2, I1) = U V^T and A(I1, I2) = W Z^T for the children (I1, I2) of the node.
struct HodlrNode {
  Matrix U, V, W, Z;
};

// levels[l] holds 2^l nodes whose children have size n >> (l + 1).
// Leaves are dense blocks of size `leaf`; an empty leaf list means zero.
// Padded forms act on the logical range [offset, offset + logical_n).
struct HodlrForm {
  Index n = 0;
  Index logical_n = 0;
  Index offset = 0;
  Index leaf = 0;
  bool symmetric = false;
  std::vector<std::vector<HodlrNode>> levels;
  std::vector<Matrix> leaves;
};

struct HodlrChildren {
  Range first;
  Range second;
};
HodlrChildren hodlr_children(Index n, Index level, Index node);

// Action on the power-of-two working space.
Matrix hodlr_apply_full(const HodlrForm& form, const Matrix& X, bool transpose = false);
// Action on logical vectors.
Matrix hodlr_apply(const HodlrForm& form, const Matrix& X, bool transpose = false);
Matrix hodlr_materialize(const HodlrForm& form);
// Copy keeping only the first `levels` levels and dropping the leaves.
HodlrForm hodlr_truncate(const HodlrForm& form, Index levels);

using StructuredForm = std::variant<DiagonalForm, TridiagonalForm, CirculantForm, ToeplitzForm, HankelForm,
                                    DisplacementForm, LowRankForm, HssForm, HodlrForm, DenseForm>;

enum class FormKind {
  diagonal,
  block_diagonal,
  tridiagonal,
  circulant,
  toeplitz,
  hankel,
  displacement,
  lowrank,
  hss,
  hodlr,
  dense,
};

std::string to_string(FormKind kind);
FormKind parse_form_kind(const std::string& name);
FormKind kind_of(const StructuredForm& form);

Index form_dim(const StructuredForm& form);
Matrix materialize(const StructuredForm& form);
Matrix apply_form(const StructuredForm& form, const Matrix& X);
Matrix apply_form_transpose(const StructuredForm& form, const Matrix& X);
LinearMap form_map(const StructuredForm& form);
Oracle make_oracle(const StructuredForm& form);

// Width of the retained tail for decay-mode blocks.
Index decay_width(Index block_size, Index k);

// All free parameters are i.i.d. standard Gaussian from the seed's stream.
// For block_diagonal, k is the block size; for hss/hodlr/lowrank, the rank.
StructuredForm random_form(FormKind kind, Index n, Index k, std::uint64_t seed, bool symmetric = false,
                           std::optional<double> decay = std::nullopt);

HssForm random_hss(Index n, Index k, std::uint64_t seed, bool symmetric, std::optional<double> decay = std::nullopt);
HodlrForm random_hodlr(Index n, Index k, std::uint64_t seed, bool symmetric,
                       std::optional<double> decay = std::nullopt);

// Unique A with Z_1 A - A Z_{-1} = G H^T.
Matrix displacement_to_dense(const Matrix& G, const Matrix& H);

}  // namespace mvr
