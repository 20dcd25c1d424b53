#include "mvr/serialize.hpp"
#include "mvr/structured.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MVR_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string field;
  while (std::getline(s, field, sep)) out.push_back(field);
  return out;
}

std::vector<std::string> lines(const std::string& text) { return split(text, '\n'); }

// Value of a named column in row `row` (1-based after the header).
std::string column(const std::string& csv, const std::string& name, size_t row = 1) {
  auto ls = lines(csv);
  REQUIRE(ls.size() > row);
  auto header = split(ls[0], ',');
  auto fields = split(ls[row], ',');
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return fields.at(i);
  FAIL("missing column " << name);
  return {};
}

}  // namespace

TEST_CASE("recover a symmetric HSS matrix") {
  Run r = run("recover --structure hss --symmetric --n 1024 --rank 1 --oversample 5 --seed 42");
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[0] ==
        "structure,N,k,p,seed,mode,noise_eps,queries_A,queries_AT,rel_err_spectral,lsq_residual,wall_ms");
  CHECK(column(r.out, "queries_AT") == "0");
  CHECK(column(r.out, "queries_A") == "10");
  CHECK(std::stod(column(r.out, "rel_err_spectral")) <= 1e-10);
}

TEST_CASE("recover a circulant matrix with one query") {
  Run r = run("recover --structure circulant --n 8 --mode deterministic --seed 0");
  REQUIRE(r.code == 0);
  CHECK(column(r.out, "queries_A") == "1");
  CHECK(column(r.out, "queries_AT") == "0");
}

TEST_CASE("recover a loaded zero diagonal") {
  const auto path = std::filesystem::temp_directory_path() / "mvr_cli_zero_diag.txt";
  mvr::save_form_file(path.string(), mvr::DiagonalForm{mvr::Vector::Zero(4)}, 0);
  Run r = run("recover --structure diagonal --seed 0 --load " + path.string());
  std::filesystem::remove(path);
  REQUIRE(r.code == 0);
  CHECK(column(r.out, "N") == "4");
  CHECK(std::stod(column(r.out, "rel_err_spectral")) == 0.0);
}

TEST_CASE("recover writes to a file and honours --no-header") {
  const auto path = std::filesystem::temp_directory_path() / "mvr_cli_row.csv";
  Run r = run("recover --structure toeplitz --n 16 --no-header --out " + path.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::FILE* f = std::fopen(path.string().c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[512] = {};
  CHECK(std::fgets(buf, sizeof buf, f) != nullptr);
  std::fclose(f);
  std::filesystem::remove(path);
  CHECK(std::string(buf).rfind("toeplitz,16,", 0) == 0);
}

TEST_CASE("the query table keeps HSS counts constant in N") {
  Run r = run("table queries --max-n 256 --seeds 0");
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls[0] == "structure,N,k,p,seed,mode,noise_eps,queries_A,queries_AT,rel_err_spectral,lsq_residual,wall_ms,"
                 "abs_err_spectral,solve_ms,seeds");
  std::string first;
  int hss_rows = 0;
  for (size_t i = 1; i < ls.size(); ++i) {
    auto f = split(ls[i], ',');
    if (f[0] != "hss_sym" || f[5] != "capped") continue;
    ++hss_rows;
    if (first.empty()) first = f[7];
    CHECK(f[7] == first);
    CHECK(std::stod(f[9]) <= 1e-10);
  }
  CHECK(hss_rows == 4);
  CHECK(first == "10");
}

TEST_CASE("witness subcommands") {
  Run s = run("witness symmetric --n 8 --seed 2");
  CHECK(s.code == 0);
  CHECK(s.out.find("FAIL") == std::string::npos);
  CHECK(s.out.find("PASS") != std::string::npos);

  Run o = run("witness orthogonal --n 4 --identity");
  CHECK(o.code == 0);
  CHECK(o.out.find("distinct from A  2.000e+00 >= ") != std::string::npos);
  const size_t at = o.out.find("B =\n");
  REQUIRE(at != std::string::npos);
  std::istringstream b(o.out.substr(at + 4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double v = 0;
      b >> v;
      CHECK(v == (i != j ? 0.0 : (i == 3 ? -1.0 : 1.0)));
    }

  Run l = run("witness lowrank --n 8 --rank 2 --k1 1 --k2 1 --seed 3");
  CHECK(l.code == 0);
  CHECK(l.out.find("FAIL") == std::string::npos);

  CHECK(run("witness lowrank --n 8 --rank 2 --k1 2 --k2 2").code == 2);
}

TEST_CASE("usage errors exit nonzero") {
  CHECK(run("").code != 0);
  CHECK(run("recover --structure nope").code != 0);
  CHECK(run("recover --structure hss --n 24").code != 0);
  CHECK(run("recover --structure circulant --mode sideways").code == 2);
  CHECK(run("table nope").code != 0);
  CHECK(run("recover --load /nonexistent/file").code != 0);
}
