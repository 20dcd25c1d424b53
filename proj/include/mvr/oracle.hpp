#pragma once

#include "mvr/numerics.hpp"
#include "mvr/types.hpp"

#include <functional>
#include <memory>
#include <mutex>

namespace mvr {

struct QueryLedger {
  Index m = 0;  // forward products
  Index n = 0;  // transpose products
  Index total() const { return m + n; }
};

inline bool operator==(const QueryLedger& a, const QueryLedger& b) { return a.m == b.m && a.n == b.n; }
inline QueryLedger operator-(const QueryLedger& a, const QueryLedger& b) { return {a.m - b.m, a.n - b.n}; }

struct NoiseSpec {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

// Black-box access to x -> A x and x -> A^T x. Copies share state, so a
// wrapper that forwards to a base oracle charges the base ledger.
class Oracle {
 public:
  using BatchFn = std::function<Matrix(const Matrix&)>;

  Oracle(Index n, BatchFn apply, BatchFn apply_transpose);

  static Oracle dense(Matrix A);
  static Oracle from_map(const LinearMap& map);

  Index dim() const { return state_->n; }

  Matrix query(const Matrix& X) const;
  Matrix query_transpose(const Matrix& X) const;
  Vector query(const Vector& x) const { return query(Matrix(x)).col(0); }
  Vector query_transpose(const Vector& x) const { return query_transpose(Matrix(x)).col(0); }
  template <typename Derived>
  Matrix query(const Eigen::MatrixBase<Derived>& X) const { return query(Matrix(X)); }
  template <typename Derived>
  Matrix query_transpose(const Eigen::MatrixBase<Derived>& X) const { return query_transpose(Matrix(X)); }

  QueryLedger ledger() const;

  // Uncounted access for error measurement; never used by recovery code.
  LinearMap as_map() const;

  friend Oracle with_noise(const Oracle& base, const NoiseSpec& spec);

 private:
  struct State {
    Index n = 0;
    BatchFn apply;
    BatchFn apply_transpose;
    NoiseSpec noise;
    QueryLedger ledger;
    std::mutex mutex;
  };
  Matrix run(const Matrix& X, bool transpose) const;

  std::shared_ptr<State> state_;
};

// Each returned column gets epsilon * w added, w ~ N(0, I) drawn from the
// stream keyed by (seed, global query index of that column).
Oracle with_noise(const Oracle& base, const NoiseSpec& spec);

// Oracle on the zero-padded size n_padded: coordinates outside
// [offset, offset + base.dim()) are ignored on input and zero on output.
Oracle padded_oracle(const Oracle& base, Index n_padded, Index offset);

// Left offset of the embedding used by padded recovery.
inline Index padding_offset(Index n, Index n_padded) { return (n_padded - n) / 2; }

}  // namespace mvr
