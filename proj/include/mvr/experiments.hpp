#pragma once

#include "mvr/oracle.hpp"
#include "mvr/structured.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mvr {

// One recovery run. `mode` selects the variant:
//   tridiagonal: recursive | comb;  circulant, toeplitz: deterministic | randomized;
//   lowrank: rsvd | nystrom;  hss: capped | minimal;
//   hodlr: generic | symmetric | general.
// An empty mode picks the first listed option (hodlr: symmetric when symmetric, else general).
struct RunSpec {
  FormKind structure = FormKind::diagonal;
  Index n = 8;
  Index k = 1;
  Index p = 5;
  std::uint64_t seed = 0;
  bool symmetric = false;
  std::string mode;
  double noise_eps = 0.0;
  std::optional<double> decay;
};

struct RunResult {
  RunSpec spec;
  std::string mode;  // resolved
  QueryLedger ledger;
  double rel_err = 0.0;  // spectral, 20 power iterations
  double abs_err = 0.0;
  double lsq_residual = 0.0;
  double wall_ms = 0.0;
  double solve_ms = 0.0;  // HSS sparse solve only
};

// Generates the ground truth from the run settings.
RunResult run_recovery(const RunSpec& spec);
// Uses a given ground truth (spec.structure selects the algorithm).
RunResult run_recovery(const StructuredForm& truth, const RunSpec& spec);

std::string csv_header();
std::string csv_row(const RunResult& r);

struct TableConfig {
  std::string id;  // queries | hss_error | hodlr_error | noise | numrank | scaling
  Index max_n = 4096;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::optional<Index> rank;  // overrides the experiment's rank grid
  Index p = 5;
  double eps = 1e-5;
  double decay = 0.05;
};

// Per-cell means over the seed list, in grid order.
std::vector<RunResult> run_table(const TableConfig& cfg);
// csv_header() plus abs_err_spectral, solve_ms and seeds columns.
void write_table(std::ostream& out, const TableConfig& cfg, const std::vector<RunResult>& rows);
std::vector<std::string> table_ids();

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mvr
