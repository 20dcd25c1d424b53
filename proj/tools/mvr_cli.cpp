// Command-line harness: single recoveries, experiment tables and witnesses.
#include "mvr/experiments.hpp"
#include "mvr/lowrank.hpp"
#include "mvr/random.hpp"
#include "mvr/serialize.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

struct RecoverArgs {
  std::string structure = "diagonal";
  mvr::Index n = 8, rank = 1, oversample = 5;
  std::uint64_t seed = 0;
  std::string mode;
  bool symmetric = false;
  double noise = 0.0;
  double decay = 0.0;
  std::string load, save, out;
  bool header = true;
};

struct TableArgs {
  std::string id;
  mvr::Index max_n = 4096;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  mvr::Index rank = 0, oversample = 5;
  double eps = 1e-5, decay = 0.05;
  std::string out;
};

struct WitnessArgs {
  std::string kind;
  mvr::Index n = 8, rank = 2, k1 = 1, k2 = 1;
  std::uint64_t seed = 0;
  bool identity = false;
};

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw mvr::IoError("cannot open " + path);
  return file;
}

int cmd_recover(const RecoverArgs& a) {
  mvr::RunSpec spec;
  spec.structure = mvr::parse_form_kind(a.structure);
  spec.n = a.n;
  spec.k = a.rank;
  spec.p = a.oversample;
  spec.seed = a.seed;
  spec.mode = a.mode;
  spec.symmetric = a.symmetric;
  spec.noise_eps = a.noise;
  if (a.decay > 0) spec.decay = a.decay;

  mvr::RunResult r;
  if (!a.load.empty()) {
    mvr::LoadedForm lf = mvr::load_form_file(a.load);
    if (mvr::kind_of(lf.form) != spec.structure && spec.structure != mvr::FormKind::block_diagonal)
      throw mvr::ConfigError("--structure does not match the loaded form");
    spec.n = mvr::form_dim(lf.form);
    r = mvr::run_recovery(lf.form, spec);
  } else {
    mvr::StructuredForm truth = mvr::random_form(spec.structure, spec.n, spec.k, spec.seed, spec.symmetric, spec.decay);
    if (!a.save.empty()) mvr::save_form_file(a.save, truth, spec.seed);
    r = mvr::run_recovery(truth, spec);
  }
  std::ofstream file;
  std::ostream& os = open_out(a.out, file);
  if (a.header) os << mvr::csv_header() << '\n';
  os << mvr::csv_row(r) << '\n';
  return 0;
}

int cmd_table(const TableArgs& a) {
  mvr::TableConfig cfg;
  cfg.id = a.id;
  cfg.max_n = a.max_n;
  cfg.seeds = a.seeds;
  if (a.rank > 0) cfg.rank = a.rank;
  cfg.p = a.oversample;
  cfg.eps = a.eps;
  cfg.decay = a.decay;
  auto rows = mvr::run_table(cfg);
  std::ofstream file;
  mvr::write_table(open_out(a.out, file), cfg, rows);
  return 0;
}

void print_certificates(const std::vector<mvr::Certificate>& certs, bool& ok) {
  for (const auto& c : certs) {
    std::cout << std::left << std::setw(16) << c.name << ' ' << std::scientific << std::setprecision(3) << c.value
              << (c.name.rfind("distinct", 0) == 0 ? " >= " : " <= ") << c.bound << "  " << (c.pass ? "PASS" : "FAIL") << '\n';
    ok = ok && c.pass;
  }
}

int cmd_witness(const WitnessArgs& a) {
  using mvr::Matrix;
  const mvr::Index n = a.n;
  mvr::GaussianStream g(a.seed, mvr::streams::witness);
  bool ok = true;
  mvr::Witness w;
  if (a.kind == "lowrank") {
    Matrix A = g.matrix(n, a.rank) * g.matrix(n, a.rank).transpose();
    Matrix X = mvr::orth(g.matrix(n, a.k1), 1e-12);
    Matrix W = mvr::orth(g.matrix(n, a.k2), 1e-12);
    w = mvr::witness_lowrank(X, W, A, a.rank);
    std::cout << "construction: " << w.construction << '\n';
    print_certificates(mvr::certify_lowrank(X, W, A, a.rank, w.B), ok);
  } else if (a.kind == "symmetric") {
    Matrix A = g.symmetric(n);
    Matrix X = g.matrix(n, n - 1);
    w = mvr::witness_symmetric(A, X);
    std::cout << "construction: " << w.construction << '\n';
    print_certificates(mvr::certify_symmetric(A, X, w.B), ok);
  } else if (a.kind == "orthogonal") {
    Matrix A, X;
    if (a.identity) {
      A = Matrix::Identity(n, n);
      X = A.leftCols(n - 1);
    } else {
      Eigen::HouseholderQR<Matrix> qr(g.matrix(n, n));
      A = qr.householderQ();
      X = g.matrix(n, n - 1);
    }
    w = mvr::witness_orthogonal(A, X);
    std::cout << "construction: " << w.construction << '\n';
    print_certificates(mvr::certify_orthogonal(A, X, w.B), ok);
  } else {
    throw mvr::ConfigError("unknown witness '" + a.kind + "'");
  }
  if (n <= 16) {
    Eigen::IOFormat f(6, 0, " ", "\n", "  ");
    std::cout << "B =\n" << std::fixed << w.B.format(f) << '\n';
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured matrix recovery from matrix-vector products"};
  app.require_subcommand(1);

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "Recover one generated or loaded matrix and print a CSV row");
  rec->add_option("--structure", ra.structure, "diagonal, block_diagonal, tridiagonal, circulant, toeplitz, hankel, "
                                              "displacement, lowrank, hss, hodlr");
  rec->add_option("--n", ra.n, "Dimension")->check(CLI::PositiveNumber);
  rec->add_option("--rank,-k", ra.rank, "Rank (block size for block_diagonal)")->check(CLI::PositiveNumber);
  rec->add_option("--oversample,-p", ra.oversample, "Oversampling")->check(CLI::NonNegativeNumber);
  rec->add_option("--seed", ra.seed);
  rec->add_option("--mode", ra.mode, "Algorithm variant");
  rec->add_flag("--symmetric", ra.symmetric);
  rec->add_option("--noise", ra.noise, "Per-entry Gaussian noise level on every query")->check(CLI::NonNegativeNumber);
  rec->add_option("--decay", ra.decay, "Singular value decay rate for hss/hodlr/lowrank blocks");
  rec->add_option("--load", ra.load, "Serialized ground truth")->check(CLI::ExistingFile);
  rec->add_option("--save", ra.save, "Write the generated ground truth");
  rec->add_option("--out", ra.out, "CSV output path (default stdout)");
  rec->add_flag("!--no-header", ra.header, "Omit the CSV header");

  TableArgs ta;
  auto* tab = app.add_subcommand("table", "Run an experiment sweep and print a CSV");
  tab->add_option("id", ta.id)->required()->check(CLI::IsMember(mvr::table_ids()));
  tab->add_option("--max-n", ta.max_n, "Largest N in the sweep")->check(CLI::PositiveNumber);
  tab->add_option("--seeds", ta.seeds, "Seed list")->delimiter(',');
  tab->add_option("--rank,-k", ta.rank, "Override the rank grid")->check(CLI::PositiveNumber);
  tab->add_option("--oversample,-p", ta.oversample)->check(CLI::NonNegativeNumber);
  tab->add_option("--eps", ta.eps, "Noise level (noise table)");
  tab->add_option("--decay", ta.decay, "Decay rate (numrank table)");
  tab->add_option("--out", ta.out, "CSV output path (default stdout)");

  WitnessArgs wa;
  auto* wit = app.add_subcommand("witness", "Build a non-uniqueness witness and print its certificates");
  wit->add_option("kind", wa.kind)->required()->check(CLI::IsMember({"lowrank", "symmetric", "orthogonal"}));
  wit->add_option("--n", wa.n)->check(CLI::Range(2, 4096));
  wit->add_option("--rank,-k", wa.rank)->check(CLI::PositiveNumber);
  wit->add_option("--k1", wa.k1, "Forward query count")->check(CLI::PositiveNumber);
  wit->add_option("--k2", wa.k2, "Transpose query count")->check(CLI::PositiveNumber);
  wit->add_option("--seed", wa.seed);
  wit->add_flag("--identity", wa.identity, "Orthogonal witness on A = I with X = first N-1 unit vectors");

  CLI11_PARSE(app, argc, argv);
  try {
    if (rec->parsed()) return cmd_recover(ra);
    if (tab->parsed()) return cmd_table(ta);
    if (wit->parsed()) return cmd_witness(wa);
  } catch (const mvr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool usage = e.kind() == mvr::ErrorKind::config || e.kind() == mvr::ErrorKind::shape;
    return usage ? 2 : 1;
  }
  return 0;
}
