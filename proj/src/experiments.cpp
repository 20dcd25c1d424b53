#include "mvr/experiments.hpp"

#include "mvr/basic_recovery.hpp"
#include "mvr/hodlr.hpp"
#include "mvr/hss.hpp"
#include "mvr/lowrank.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mvr {

namespace {

std::string default_mode(const RunSpec& s) {
  switch (s.structure) {
    case FormKind::tridiagonal: return s.symmetric ? "symmetric" : "recursive";
    case FormKind::circulant:
    case FormKind::toeplitz: return "deterministic";
    case FormKind::lowrank: return s.symmetric ? "nystrom" : "rsvd";
    case FormKind::hss: return "capped";
    case FormKind::hodlr: return s.symmetric ? "symmetric" : "general";
    default: return "default";
  }
}

[[noreturn]] void bad_mode(const RunSpec& s, const std::string& mode) {
  throw ConfigError("unknown mode '" + mode + "' for structure " + to_string(s.structure));
}

ProbeMode probe_mode(const RunSpec& s, const std::string& mode) {
  if (mode == "deterministic") return ProbeMode::deterministic;
  if (mode == "randomized") return ProbeMode::randomized;
  bad_mode(s, mode);
}

struct Recovered {
  StructuredForm form;
  double lsq_residual = 0.0;
  double solve_ms = 0.0;
};

Recovered recover(const Oracle& oracle, const RunSpec& s, const std::string& mode) {
  switch (s.structure) {
    case FormKind::diagonal: return {recover_diagonal(oracle)};
    case FormKind::block_diagonal: return {recover_block_diagonal(oracle, s.k)};
    case FormKind::tridiagonal:
      if (mode == "symmetric") return {recover_symmetric_tridiagonal(oracle)};
      if (mode == "recursive") return {recover_tridiagonal(oracle, TridiagonalMode::recursive)};
      if (mode == "comb") return {recover_tridiagonal(oracle, TridiagonalMode::comb)};
      bad_mode(s, mode);
    case FormKind::circulant: return {recover_circulant(oracle, probe_mode(s, mode), s.seed)};
    case FormKind::toeplitz: return {recover_toeplitz(oracle, probe_mode(s, mode), s.seed)};
    case FormKind::hankel: return {recover_hankel(oracle, s.seed)};
    case FormKind::displacement: return {recover_toeplitz_like(oracle, s.p, s.seed)};
    case FormKind::lowrank: {
      SketchConfig cfg{s.k, s.p, s.seed};
      if (mode == "rsvd") return {rsvd_recover(oracle, cfg)};
      if (mode == "nystrom") return {nystrom_recover_symmetric(oracle, cfg)};
      bad_mode(s, mode);
    }
    case FormKind::hss: {
      HssConfig cfg;
      cfg.sketch = {s.k, s.p, s.seed};
      if (mode == "capped")
        cfg.rule = SystemQueryRule::capped;
      else if (mode == "minimal")
        cfg.rule = SystemQueryRule::minimal;
      else
        bad_mode(s, mode);
      HssReport rep = recover_hss(oracle, cfg, s.symmetric);
      return {rep.form, rep.residual, rep.solve_ms};
    }
    case FormKind::hodlr: {
      HodlrConfig cfg;
      cfg.k = s.k;
      cfg.p = s.p;
      cfg.seed = s.seed;
      HodlrReport rep;
      if (mode == "generic") {
        if (s.k != 1) throw ConfigError("generic HODLR recovery is rank 1 only");
        rep = recover_hodlr_generic_rank1(oracle, s.p, s.seed);
      } else if (mode == "symmetric") {
        rep = recover_hodlr_symmetric(oracle, cfg);
      } else if (mode == "general") {
        rep = recover_hodlr_general(oracle, cfg);
      } else {
        bad_mode(s, mode);
      }
      return {rep.form, rep.restricted_residual};
    }
    default: throw ConfigError("no recovery routine for structure " + to_string(s.structure));
  }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Index> powers(Index lo, Index hi) {
  std::vector<Index> out;
  for (Index n = lo; n <= hi; n *= 2) out.push_back(n);
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

RunResult run_recovery(const StructuredForm& truth, const RunSpec& spec) {
  RunResult r;
  r.spec = spec;
  r.mode = spec.mode.empty() ? default_mode(spec) : spec.mode;
  Oracle base = make_oracle(truth);
  Oracle oracle = spec.noise_eps > 0 ? with_noise(base, {spec.noise_eps, spec.seed}) : base;
  const auto t0 = std::chrono::steady_clock::now();
  Recovered rec = recover(oracle, spec, r.mode);
  r.wall_ms = ms_since(t0);
  r.ledger = oracle.ledger();
  r.lsq_residual = rec.lsq_residual;
  r.solve_ms = rec.solve_ms;
  LinearMap ref = form_map(truth);
  LinearMap diff = difference(ref, form_map(rec.form));
  r.abs_err = spectral_norm_estimate(diff, 20, spec.seed);
  r.rel_err = spectral_relative_error(diff, ref, 20, spec.seed);
  return r;
}

RunResult run_recovery(const RunSpec& spec) {
  return run_recovery(random_form(spec.structure, spec.n, spec.k, spec.seed, spec.symmetric, spec.decay), spec);
}

std::string csv_header() {
  return "structure,N,k,p,seed,mode,noise_eps,queries_A,queries_AT,rel_err_spectral,lsq_residual,wall_ms";
}

std::string csv_row(const RunResult& r) {
  std::ostringstream s;
  s << to_string(r.spec.structure) << (r.spec.symmetric ? "_sym" : "") << ',' << r.spec.n << ',' << r.spec.k << ','
    << r.spec.p << ',' << r.spec.seed << ',' << r.mode << ',' << fmt(r.spec.noise_eps) << ',' << r.ledger.m << ','
    << r.ledger.n << ',' << fmt(r.rel_err) << ',' << fmt(r.lsq_residual) << ',' << fmt(r.wall_ms);
  return s.str();
}

std::vector<std::string> table_ids() { return {"queries", "hss_error", "hodlr_error", "noise", "numrank", "scaling"}; }

std::vector<RunResult> run_table(const TableConfig& cfg) {
  std::vector<RunSpec> cells;
  auto cell = [&](FormKind kind, Index n, Index k, bool sym, const std::string& mode) {
    RunSpec s;
    s.structure = kind;
    s.n = n;
    s.k = k;
    s.p = cfg.p;
    s.symmetric = sym;
    s.mode = mode;
    cells.push_back(s);
    return &cells.back();
  };
  const std::string& id = cfg.id;
  if (id == "queries") {
    const Index k = cfg.rank.value_or(1);
    for (Index n : powers(32, cfg.max_n)) {
      cell(FormKind::hss, n, k, true, "capped");
      cell(FormKind::hss, n, k, true, "minimal");
      cell(FormKind::hss, n, k, false, "capped");
      cell(FormKind::hodlr, n, k, true, "symmetric");
      cell(FormKind::hodlr, n, k, false, "general");
    }
  } else if (id == "hss_error") {
    std::vector<Index> ks = cfg.rank ? std::vector<Index>{*cfg.rank} : std::vector<Index>{1, 2, 4};
    for (Index k : ks)
      for (Index n : powers(32, cfg.max_n)) cell(FormKind::hss, n, k, true, "capped");
  } else if (id == "hodlr_error") {
    std::vector<Index> ks = cfg.rank ? std::vector<Index>{*cfg.rank} : std::vector<Index>{1, 2};
    for (Index k : ks)
      for (Index n : powers(64, cfg.max_n)) {
        if (k == 1) cell(FormKind::hodlr, n, k, true, "generic");
        cell(FormKind::hodlr, n, k, true, "symmetric");
        cell(FormKind::hodlr, n, k, false, "general");
      }
  } else if (id == "noise") {
    const Index k = cfg.rank.value_or(1);
    for (Index n : powers(32, std::min<Index>(1024, cfg.max_n))) {
      cell(FormKind::hss, n, k, true, "capped")->noise_eps = cfg.eps;
      cell(FormKind::hodlr, n, k, true, "symmetric")->noise_eps = cfg.eps;
    }
  } else if (id == "numrank") {
    const Index k = cfg.rank.value_or(10);
    for (Index n : powers(2048, cfg.max_n)) {
      cell(FormKind::hss, n, k, true, "capped")->decay = cfg.decay;
      cell(FormKind::hodlr, n, k, true, "symmetric")->decay = cfg.decay;
    }
  } else if (id == "scaling") {
    for (Index n : powers(1024, cfg.max_n)) cell(FormKind::hss, n, cfg.rank.value_or(1), true, "capped");
  } else {
    throw ConfigError("unknown table id '" + id + "'");
  }
  if (cfg.seeds.empty()) throw ConfigError("table: empty seed list");

  std::vector<RunResult> rows;
  for (const RunSpec& base : cells) {
    RunResult mean;
    const double count = double(cfg.seeds.size());
    for (size_t i = 0; i < cfg.seeds.size(); ++i) {
      RunSpec s = base;
      s.seed = cfg.seeds[i];
      RunResult r = run_recovery(s);
      if (i == 0) {
        mean = r;
        mean.rel_err = mean.abs_err = mean.lsq_residual = mean.wall_ms = mean.solve_ms = 0.0;
      }
      mean.rel_err += r.rel_err / count;
      mean.abs_err += r.abs_err / count;
      mean.lsq_residual += r.lsq_residual / count;
      mean.wall_ms += r.wall_ms / count;
      mean.solve_ms += r.solve_ms / count;
      // Ledgers are fixed per cell; keep the largest in case a data-dependent path differs.
      mean.ledger.m = std::max(mean.ledger.m, r.ledger.m);
      mean.ledger.n = std::max(mean.ledger.n, r.ledger.n);
    }
    rows.push_back(mean);
  }
  return rows;
}

void write_table(std::ostream& out, const TableConfig& cfg, const std::vector<RunResult>& rows) {
  out << csv_header() << ",abs_err_spectral,solve_ms,seeds\n";
  for (const RunResult& r : rows)
    out << csv_row(r) << ',' << fmt(r.abs_err) << ',' << fmt(r.solve_ms) << ',' << cfg.seeds.size() << '\n';
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need two or more paired points");
  const double m = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace mvr
