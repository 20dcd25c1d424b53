#include "mvr/structured.hpp"

#include "internal.hpp"

#include "mvr/numerics.hpp"
#include "mvr/random.hpp"

#include <array>
#include <cmath>
#include <memory>

namespace mvr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Matrix tridiagonal_apply(const TridiagonalForm& f, const Matrix& X, bool transpose) {
  const Index n = f.main.size();
  const Vector& up = transpose ? f.sub : f.super;
  const Vector& lo = transpose ? f.super : f.sub;
  Matrix Y = f.main.asDiagonal() * X;
  if (n > 1) {
    Y.topRows(n - 1) += up.asDiagonal() * X.bottomRows(n - 1);
    Y.bottomRows(n - 1) += lo.asDiagonal() * X.topRows(n - 1);
  }
  return Y;
}

// y_i = sum_j col[i - j] x_j for i >= j, row[j - i] x_j otherwise.
Matrix toeplitz_apply(const Vector& col, const Vector& row, const Matrix& X) {
  const Index n = col.size();
  Matrix Y = Matrix::Zero(n, X.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) Y.row(i) += (i >= j ? col(i - j) : row(j - i)) * X.row(j);
  return Y;
}

Matrix circulant_apply(const Vector& c, const Matrix& X, bool transpose) {
  const Index n = c.size();
  Matrix Y = Matrix::Zero(n, X.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Index d = transpose ? (j - i) : (i - j);
      Y.row(i) += c(((d % n) + n) % n) * X.row(j);
    }
  return Y;
}

Matrix hankel_apply(const Vector& h, const Matrix& X) {
  const Index n = (h.size() + 1) / 2;
  Matrix Y = Matrix::Zero(n, X.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) Y.row(i) += h(i + j) * X.row(j);
  return Y;
}

Matrix apply_impl(const StructuredForm& form, const Matrix& X, bool t) {
  if (X.rows() != form_dim(form))
    throw ShapeError("apply_form: input has " + std::to_string(X.rows()) + " rows, expected " +
                     std::to_string(form_dim(form)));
  return std::visit(
      overloaded{
          [&](const DiagonalForm& f) -> Matrix { return f.d.asDiagonal() * X; },
          [&](const TridiagonalForm& f) -> Matrix { return tridiagonal_apply(f, X, t); },
          [&](const CirculantForm& f) -> Matrix { return circulant_apply(f.c, X, t); },
          [&](const ToeplitzForm& f) -> Matrix { return t ? toeplitz_apply(f.t2, f.t1, X) : toeplitz_apply(f.t1, f.t2, X); },
          [&](const HankelForm& f) -> Matrix { return hankel_apply(f.h, X); },
          [&](const DisplacementForm& f) -> Matrix { return t ? Matrix(f.dense.transpose() * X) : Matrix(f.dense * X); },
          [&](const LowRankForm& f) -> Matrix {
            return t ? Matrix(f.V * (f.U.transpose() * X)) : Matrix(f.U * (f.V.transpose() * X));
          },
          [&](const HssForm& f) -> Matrix { return hss_apply(f, X, t); },
          [&](const HodlrForm& f) -> Matrix { return hodlr_apply(f, X, t); },
          [&](const DenseForm& f) -> Matrix { return t ? Matrix(f.A.transpose() * X) : Matrix(f.A * X); },
      },
      form);
}

// Q1 diag(rho^j) Q2^T factors with orthonormal Q1, Q2 of the given width.
std::pair<Matrix, Matrix> decay_factors(GaussianStream& g, Index rows, Index cols, Index width, double rho) {
  Matrix Q1 = Eigen::HouseholderQR<Matrix>(g.matrix(rows, width)).householderQ() * Matrix::Identity(rows, width);
  Matrix Q2 = Eigen::HouseholderQR<Matrix>(g.matrix(cols, width)).householderQ() * Matrix::Identity(cols, width);
  Vector s(width);
  for (Index j = 0; j < width; ++j) s(j) = std::pow(rho, double(j));
  return {Q1 * s.asDiagonal(), Q2};
}

void check_decay(const std::optional<double>& decay) {
  if (decay && !(*decay > 0.0 && *decay < 1.0)) throw ConfigError("decay rate must lie in (0, 1)");
}

}  // namespace

std::string to_string(FormKind kind) {
  switch (kind) {
    case FormKind::diagonal: return "diagonal";
    case FormKind::block_diagonal: return "block_diagonal";
    case FormKind::tridiagonal: return "tridiagonal";
    case FormKind::circulant: return "circulant";
    case FormKind::toeplitz: return "toeplitz";
    case FormKind::hankel: return "hankel";
    case FormKind::displacement: return "toeplitz_like";
    case FormKind::lowrank: return "lowrank";
    case FormKind::hss: return "hss";
    case FormKind::hodlr: return "hodlr";
    case FormKind::dense: return "dense";
  }
  return "unknown";
}

FormKind parse_form_kind(const std::string& name) {
  for (FormKind k : {FormKind::diagonal, FormKind::block_diagonal, FormKind::tridiagonal, FormKind::circulant,
                     FormKind::toeplitz, FormKind::hankel, FormKind::displacement, FormKind::lowrank, FormKind::hss,
                     FormKind::hodlr, FormKind::dense})
    if (to_string(k) == name) return k;
  if (name == "displacement") return FormKind::displacement;
  throw ConfigError("unknown structure '" + name + "'");
}

FormKind kind_of(const StructuredForm& form) {
  return std::visit(overloaded{
                        [](const DiagonalForm&) { return FormKind::diagonal; },
                        [](const TridiagonalForm&) { return FormKind::tridiagonal; },
                        [](const CirculantForm&) { return FormKind::circulant; },
                        [](const ToeplitzForm&) { return FormKind::toeplitz; },
                        [](const HankelForm&) { return FormKind::hankel; },
                        [](const DisplacementForm&) { return FormKind::displacement; },
                        [](const LowRankForm&) { return FormKind::lowrank; },
                        [](const HssForm&) { return FormKind::hss; },
                        [](const HodlrForm&) { return FormKind::hodlr; },
                        [](const DenseForm&) { return FormKind::dense; },
                    },
                    form);
}

Index form_dim(const StructuredForm& form) {
  return std::visit(overloaded{
                        [](const DiagonalForm& f) { return f.d.size(); },
                        [](const TridiagonalForm& f) { return f.main.size(); },
                        [](const CirculantForm& f) { return f.c.size(); },
                        [](const ToeplitzForm& f) { return f.t1.size(); },
                        [](const HankelForm& f) { return (f.h.size() + 1) / 2; },
                        [](const DisplacementForm& f) { return f.dense.rows(); },
                        [](const LowRankForm& f) { return f.U.rows(); },
                        [](const HssForm& f) { return f.n; },
                        [](const HodlrForm& f) { return f.logical_n; },
                        [](const DenseForm& f) { return f.A.rows(); },
                    },
                    form);
}

Matrix apply_form(const StructuredForm& form, const Matrix& X) { return apply_impl(form, X, false); }

Matrix apply_form_transpose(const StructuredForm& form, const Matrix& X) { return apply_impl(form, X, true); }

Matrix materialize(const StructuredForm& form) {
  if (auto* f = std::get_if<HssForm>(&form)) return hss_materialize(*f);
  if (auto* f = std::get_if<HodlrForm>(&form)) return hodlr_materialize(*f);
  if (auto* f = std::get_if<DenseForm>(&form)) return f->A;
  if (auto* f = std::get_if<DisplacementForm>(&form)) return f->dense;
  const Index n = form_dim(form);
  return apply_form(form, Matrix::Identity(n, n));
}

LinearMap form_map(const StructuredForm& form) {
  auto shared = std::make_shared<const StructuredForm>(form);
  return {form_dim(form), [shared](const Matrix& X) -> Matrix { return apply_form(*shared, X); },
          [shared](const Matrix& X) -> Matrix { return apply_form_transpose(*shared, X); }};
}

Oracle make_oracle(const StructuredForm& form) { return Oracle::from_map(form_map(form)); }

Index decay_width(Index block_size, Index k) { return std::min(block_size, k + 20); }

Matrix displacement_to_dense(const Matrix& G, const Matrix& H) {
  if (G.rows() != H.rows() || G.cols() != H.cols()) throw ShapeError("displacement_to_dense: G and H differ in shape");
  const Index n = G.rows();
  return sylvester_solve(shift_matrix(n, 1.0), shift_matrix(n, -1.0), G * H.transpose());
}

StructuredForm random_form(FormKind kind, Index n, Index k, std::uint64_t seed, bool symmetric,
                           std::optional<double> decay) {
  if (n <= 0) throw ConfigError("random_form: size must be positive");
  check_decay(decay);
  GaussianStream g(seed, substream(streams::generator, std::uint64_t(kind)));
  switch (kind) {
    case FormKind::diagonal: return DiagonalForm{g.vector(n)};
    case FormKind::block_diagonal: {
      if (k <= 0 || n % k != 0) throw ConfigError("block_diagonal: block size must divide N");
      Matrix A = Matrix::Zero(n, n);
      for (Index b = 0; b < n; b += k) A.block(b, b, k, k) = symmetric ? g.symmetric(k) : g.matrix(k, k);
      return DenseForm{A};
    }
    case FormKind::tridiagonal: {
      TridiagonalForm f;
      f.main = g.vector(n);
      f.sub = g.vector(std::max<Index>(n - 1, 0));
      f.super = symmetric ? f.sub : g.vector(std::max<Index>(n - 1, 0));
      f.symmetric = symmetric;
      return f;
    }
    case FormKind::circulant: return CirculantForm{g.vector(n)};
    case FormKind::toeplitz: {
      ToeplitzForm f{g.vector(n), Vector()};
      f.t2 = symmetric ? f.t1 : g.vector(n);
      f.t2(0) = f.t1(0);
      return f;
    }
    case FormKind::hankel: return HankelForm{g.vector(2 * n - 1)};
    case FormKind::displacement: {
      DisplacementForm f;
      f.G = g.matrix(n, 2);
      f.H = g.matrix(n, 2);
      f.dense = displacement_to_dense(f.G, f.H);
      return f;
    }
    case FormKind::lowrank: {
      if (k <= 0 || k > n) throw ConfigError("lowrank: rank must lie in [1, N]");
      if (decay) {
        auto [U, V] = decay_factors(g, n, n, decay_width(n, k), *decay);
        if (symmetric) V = U * (U.colwise().norm().cwiseInverse().asDiagonal());
        return LowRankForm{U, V};
      }
      Matrix U = g.matrix(n, k);
      if (symmetric) {
        Vector s = g.vector(k);
        return LowRankForm{U * s.asDiagonal(), U};
      }
      return LowRankForm{U, g.matrix(n, k)};
    }
    case FormKind::hss: return random_hss(n, k, seed, symmetric, decay);
    case FormKind::hodlr: return random_hodlr(n, k, seed, symmetric, decay);
    case FormKind::dense: {
      Matrix A = symmetric ? g.symmetric(n) : g.matrix(n, n);
      return DenseForm{A};
    }
  }
  throw ConfigError("random_form: unsupported kind");
}

std::pair<Matrix, Matrix> decay_factor_pair(GaussianStream& g, Index rows, Index cols, Index width, double rho) {
  return decay_factors(g, rows, cols, width, rho);
}

}  // namespace mvr
