#include "mvr/oracle.hpp"

#include "mvr/random.hpp"

namespace mvr {

Oracle::Oracle(Index n, BatchFn apply, BatchFn apply_transpose) : state_(std::make_shared<State>()) {
  state_->n = n;
  state_->apply = std::move(apply);
  state_->apply_transpose = std::move(apply_transpose);
}

Oracle Oracle::dense(Matrix A) {
  if (A.rows() != A.cols()) throw ShapeError("oracle: matrix must be square");
  auto shared = std::make_shared<const Matrix>(std::move(A));
  return Oracle(
      shared->rows(), [shared](const Matrix& X) -> Matrix { return *shared * X; },
      [shared](const Matrix& X) -> Matrix { return shared->transpose() * X; });
}

Oracle Oracle::from_map(const LinearMap& map) { return Oracle(map.n, map.apply, map.apply_transpose); }

Matrix Oracle::run(const Matrix& X, bool transpose) const {
  State& s = *state_;
  if (X.rows() != s.n)
    throw ShapeError("oracle: input has " + std::to_string(X.rows()) + " rows, expected " + std::to_string(s.n));
  if (X.cols() == 0) return Matrix(s.n, 0);

  Index first = 0;
  {
    std::lock_guard<std::mutex> lock(s.mutex);
    first = s.ledger.m + s.ledger.n;
    (transpose ? s.ledger.n : s.ledger.m) += X.cols();
  }
  Matrix Y = transpose ? s.apply_transpose(X) : s.apply(X);
  if (s.noise.epsilon != 0.0) {
    for (Index j = 0; j < Y.cols(); ++j) {
      GaussianStream w(s.noise.seed, substream(streams::noise, std::uint64_t(first + j)));
      Y.col(j) += s.noise.epsilon * w.vector(s.n);
    }
  }
  return Y;
}

Matrix Oracle::query(const Matrix& X) const { return run(X, false); }

Matrix Oracle::query_transpose(const Matrix& X) const { return run(X, true); }

QueryLedger Oracle::ledger() const {
  std::lock_guard<std::mutex> lock(state_->mutex);
  return state_->ledger;
}

LinearMap Oracle::as_map() const { return {state_->n, state_->apply, state_->apply_transpose}; }

Oracle with_noise(const Oracle& base, const NoiseSpec& spec) {
  Oracle out(base.state_->n, base.state_->apply, base.state_->apply_transpose);
  out.state_->noise = spec;
  return out;
}

Oracle padded_oracle(const Oracle& base, Index n_padded, Index offset) {
  const Index n = base.dim();
  if (offset < 0 || offset + n > n_padded) throw ConfigError("padded_oracle: embedding does not fit");
  auto wrap = [base, n, n_padded, offset](bool transpose) {
    return [base, n, n_padded, offset, transpose](const Matrix& X) -> Matrix {
      Matrix inner = X.middleRows(offset, n);
      Matrix Y = Matrix::Zero(n_padded, X.cols());
      Y.middleRows(offset, n) = transpose ? base.query_transpose(inner) : base.query(inner);
      return Y;
    };
  };
  return Oracle(n_padded, wrap(false), wrap(true));
}

}  // namespace mvr
