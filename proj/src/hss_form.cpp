#include "internal.hpp"
#include "mvr/structured.hpp"

#include <cmath>
#include <functional>

namespace mvr {

Index hss_leaf_exponent(Index k) {
  if (k <= 0) throw ConfigError("hss: rank must be positive");
  Index ell = 0;
  while ((Index(1) << ell) <= k) ++ell;
  return ell;
}

Index hss_leaf_size(Index n, Index k) { return std::min(Index(1) << hss_leaf_exponent(k), n / 2); }

std::vector<HssNode> hss_nodes(Index n, Index leaf) {
  std::vector<HssNode> out;
  std::function<void(int, Index, Index)> visit = [&](int half, Index begin, Index size) {
    if (size < 2 * leaf) return;
    out.push_back({half, begin, size});
    visit(half, begin, size / 2);
    visit(half, begin + size / 2, size / 2);
  };
  visit(0, 0, n / 2);
  visit(1, 0, n / 2);
  return out;
}

Index hss_parameter_count(Index n, Index k, bool symmetric) {
  const Index ell = hss_leaf_exponent(k);
  const Index leaf = Index(1) << ell;
  if (!is_power_of_two(n) || n < 2 * leaf)
    throw ConfigError("hss_parameter_count: N must be a power of two with N >= 2^(ell+1)");
  if (symmetric) return k * n + k * k * (n / leaf - 2) + (leaf + 1) * n / 2;
  return 4 * k * (n / 2) + k * k * (n / (leaf / 2) - 4) + leaf * n;
}

Index hss_free_parameters(const HssForm& f) {
  Index count = f.U.size() + f.V.size();
  if (!f.symmetric) count += f.W.size() + f.Z.size();
  for (size_t i = 0; i < f.h12.size(); ++i) count += f.h12[i].size() + (f.symmetric ? 0 : f.h21[i].size());
  for (const Matrix& D : f.leaves) count += f.symmetric ? D.rows() * (D.rows() + 1) / 2 : D.size();
  return count;
}

namespace {

// Calls fn(row0, col0, left, core, right) for every off-diagonal block
// left * core * right^T placed at (row0, col0). core == nullptr means identity.
template <class Fn>
void for_each_offdiag(const HssForm& f, Fn&& fn) {
  const Index h = f.n / 2;
  fn(h, Index(0), f.U, (const Matrix*)nullptr, f.V);
  fn(Index(0), h, f.W, (const Matrix*)nullptr, f.Z);
  std::vector<HssNode> nodes = hss_nodes(f.n, f.leaf);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const HssNode& nd = nodes[i];
    const Matrix& R = nd.half == 0 ? f.W : f.U;
    const Matrix& C = nd.half == 0 ? f.V : f.Z;
    const Index off = nd.half == 0 ? 0 : h;
    const Index s = nd.size / 2;
    const Index c1 = nd.begin, c2 = nd.begin + s;
    fn(off + c1, off + c2, R.middleRows(c1, s), &f.h12[i], C.middleRows(c2, s));
    fn(off + c2, off + c1, R.middleRows(c2, s), &f.h21[i], C.middleRows(c1, s));
  }
}

}  // namespace

Matrix hss_apply(const HssForm& f, const Matrix& X, bool transpose) {
  if (X.rows() != f.n) throw ShapeError("hss_apply: dimension mismatch");
  Matrix Y = Matrix::Zero(f.n, X.cols());
  for (size_t i = 0; i < f.leaves.size(); ++i) {
    const Index b = Index(i) * f.leaf;
    const Matrix& D = f.leaves[i];
    if (transpose)
      Y.middleRows(b, f.leaf).noalias() += D.transpose() * X.middleRows(b, f.leaf);
    else
      Y.middleRows(b, f.leaf).noalias() += D * X.middleRows(b, f.leaf);
  }
  for_each_offdiag(f, [&](Index r0, Index c0, const auto& L, const Matrix* H, const auto& R) {
    const Index rs = L.rows(), cs = R.rows();
    if (L.cols() == 0 || R.cols() == 0) return;
    if (!transpose) {
      Matrix t = R.transpose() * X.middleRows(c0, cs);
      if (H) t = *H * t;
      Y.middleRows(r0, rs).noalias() += L * t;
    } else {
      Matrix t = L.transpose() * X.middleRows(r0, rs);
      if (H) t = H->transpose() * t;
      Y.middleRows(c0, cs).noalias() += R * t;
    }
  });
  return Y;
}

Matrix hss_materialize(const HssForm& f) {
  Matrix A = Matrix::Zero(f.n, f.n);
  for (size_t i = 0; i < f.leaves.size(); ++i) A.block(Index(i) * f.leaf, Index(i) * f.leaf, f.leaf, f.leaf) = f.leaves[i];
  for_each_offdiag(f, [&](Index r0, Index c0, const auto& L, const Matrix* H, const auto& R) {
    if (L.cols() == 0 || R.cols() == 0) return;
    if (H)
      A.block(r0, c0, L.rows(), R.rows()) = L * *H * R.transpose();
    else
      A.block(r0, c0, L.rows(), R.rows()) = L * R.transpose();
  });
  return A;
}

HssForm random_hss(Index n, Index k, std::uint64_t seed, bool symmetric, std::optional<double> decay) {
  if (!is_power_of_two(n) || n < 4) throw ConfigError("hss: N must be a power of two, at least 4");
  if (k <= 0 || k > n / 2) throw ConfigError("hss: rank must lie in [1, N/2]");
  if (decay && !(*decay > 0.0 && *decay < 1.0)) throw ConfigError("decay rate must lie in (0, 1)");
  GaussianStream g(seed, substream(streams::generator, std::uint64_t(FormKind::hss)));
  HssForm f;
  f.n = n;
  f.leaf = hss_leaf_size(n, k);
  f.symmetric = symmetric;
  const Index h = n / 2;

  Vector core_scale;
  if (decay) {
    f.rank = decay_width(h, k);
    std::tie(f.U, f.V) = decay_factor_pair(g, h, h, f.rank, *decay);
    if (!symmetric) std::tie(f.W, f.Z) = decay_factor_pair(g, h, h, f.rank, *decay);
    core_scale.resize(f.rank);
    for (Index j = 0; j < f.rank; ++j) core_scale(j) = std::pow(*decay, double(j));
  } else {
    f.rank = k;
    f.U = g.matrix(h, k);
    f.V = g.matrix(h, k);
    if (!symmetric) {
      f.W = g.matrix(h, k);
      f.Z = g.matrix(h, k);
    }
  }
  if (symmetric) {
    f.W = f.V;
    f.Z = f.U;
  }

  const Index r = f.rank;
  for (const HssNode& nd : hss_nodes(n, f.leaf)) {
    (void)nd;
    Matrix a = g.matrix(r, r);
    Matrix b = symmetric ? Matrix(a.transpose()) : g.matrix(r, r);
    if (decay) {
      a = core_scale.asDiagonal() * a * core_scale.asDiagonal();
      b = core_scale.asDiagonal() * b * core_scale.asDiagonal();
    }
    f.h12.push_back(a);
    f.h21.push_back(b);
  }
  for (Index i = 0; i < n / f.leaf; ++i) f.leaves.push_back(symmetric ? g.symmetric(f.leaf) : g.matrix(f.leaf, f.leaf));
  return f;
}

}  // namespace mvr
