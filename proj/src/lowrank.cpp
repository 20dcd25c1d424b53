#include "mvr/lowrank.hpp"

#include "mvr/numerics.hpp"
#include "mvr/random.hpp"

namespace mvr {

LowRankForm rsvd_recover(const Oracle& oracle, const SketchConfig& cfg, double cutoff) {
  if (cfg.k < 1 || cfg.p < 0) throw ConfigError("rsvd_recover: need k >= 1 and p >= 0");
  const Index n = oracle.dim();
  GaussianStream rng(cfg.seed, streams::sketch);
  Matrix Y = oracle.query(rng.matrix(n, cfg.k + cfg.p));
  Matrix Q = leading_left_singular(Y, cfg.k, cutoff);
  Matrix probes = Matrix::Zero(n, cfg.k);
  probes.leftCols(Q.cols()) = Q;
  Matrix B = oracle.query_transpose(probes).leftCols(Q.cols());
  return LowRankForm{Q, B};
}

LowRankForm nystrom_recover_symmetric(const Oracle& oracle, const SketchConfig& cfg) {
  if (cfg.k < 1 || cfg.p < 0) throw ConfigError("nystrom_recover_symmetric: need k >= 1 and p >= 0");
  const Index n = oracle.dim();
  GaussianStream rng(cfg.seed, streams::sketch);
  Matrix X = rng.matrix(n, cfg.k + cfg.p);
  Matrix Y = oracle.query(X);
  Matrix core = X.transpose() * Y;
  if (numerical_rank(core) < numerical_rank(Y))
    throw IllConditionedError("nystrom_recover_symmetric: core matrix is degenerate; reseed");
  return LowRankForm{Y * pinv(core), Y};
}

}  // namespace mvr
