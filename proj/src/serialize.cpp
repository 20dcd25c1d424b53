#include "mvr/serialize.hpp"

#include <cstring>
#include <fstream>
#include <map>

namespace mvr {

namespace {

constexpr char kMagic[8] = {'M', 'V', 'R', 'F', 'O', 'R', 'M', '1'};

struct Entry {
  bool is_int = false;
  std::int64_t value = 0;
  Matrix data;
};

class Writer {
 public:
  void put(const std::string& name, std::int64_t v) { entries_.push_back({name, Entry{true, v, {}}}); }
  void put(const std::string& name, const Matrix& m) { entries_.push_back({name, Entry{false, 0, m}}); }

  void write(std::ostream& out, const std::string& kind, std::uint64_t seed) const {
    out.write(kMagic, sizeof kMagic);
    write_string(out, kind);
    write_pod(out, seed);
    write_pod(out, std::uint64_t(entries_.size()));
    for (const auto& [name, e] : entries_) {
      write_pod(out, std::uint8_t(e.is_int ? 'I' : 'M'));
      write_string(out, name);
      if (e.is_int) {
        write_pod(out, e.value);
      } else {
        write_pod(out, std::int64_t(e.data.rows()));
        write_pod(out, std::int64_t(e.data.cols()));
        out.write(reinterpret_cast<const char*>(e.data.data()), std::streamsize(e.data.size() * sizeof(double)));
      }
    }
    if (!out) throw IoError("save_form: write failed");
  }

 private:
  template <class T>
  static void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  static void write_string(std::ostream& out, const std::string& s) {
    write_pod(out, std::uint32_t(s.size()));
    out.write(s.data(), std::streamsize(s.size()));
  }
  std::vector<std::pair<std::string, Entry>> entries_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw IoError("load_form: not a form file");
    kind = read_string(in);
    seed = read_pod<std::uint64_t>(in);
    auto count = read_pod<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < count; ++i) {
      auto tag = read_pod<std::uint8_t>(in);
      std::string name = read_string(in);
      Entry e;
      if (tag == 'I') {
        e.is_int = true;
        e.value = read_pod<std::int64_t>(in);
      } else if (tag == 'M') {
        auto rows = read_pod<std::int64_t>(in);
        auto cols = read_pod<std::int64_t>(in);
        if (rows < 0 || cols < 0) throw IoError("load_form: bad array shape");
        e.data.resize(rows, cols);
        in.read(reinterpret_cast<char*>(e.data.data()), std::streamsize(e.data.size() * sizeof(double)));
      } else {
        throw IoError("load_form: unknown entry tag");
      }
      if (!in) throw IoError("load_form: truncated file");
      entries_[name] = std::move(e);
    }
  }

  std::int64_t integer(const std::string& name) const { return get(name, true).value; }
  const Matrix& matrix(const std::string& name) const { return get(name, false).data; }
  Vector vector(const std::string& name) const {
    const Matrix& m = matrix(name);
    return Eigen::Map<const Vector>(m.data(), m.size());
  }

  std::string kind;
  std::uint64_t seed = 0;

 private:
  const Entry& get(const std::string& name, bool is_int) const {
    auto it = entries_.find(name);
    if (it == entries_.end() || it->second.is_int != is_int) throw IoError("load_form: missing entry '" + name + "'");
    return it->second;
  }
  template <class T>
  static T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("load_form: truncated file");
    return v;
  }
  static std::string read_string(std::istream& in) {
    auto len = read_pod<std::uint32_t>(in);
    if (len > (1u << 20)) throw IoError("load_form: bad string length");
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
  }
  std::map<std::string, Entry> entries_;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string key(const std::string& a, Index i) { return a + "." + std::to_string(i); }
std::string key(const std::string& a, Index i, Index j) { return key(a, i) + "." + std::to_string(j); }

}  // namespace

void save_form(std::ostream& out, const StructuredForm& form, std::uint64_t seed) {
  Writer w;
  std::string kind;
  std::visit(overloaded{
                 [&](const DiagonalForm& f) {
                   kind = "diagonal";
                   w.put("d", f.d);
                 },
                 [&](const TridiagonalForm& f) {
                   kind = "tridiagonal";
                   w.put("main", f.main);
                   w.put("sub", f.sub);
                   w.put("super", f.super);
                   w.put("symmetric", std::int64_t(f.symmetric));
                 },
                 [&](const CirculantForm& f) {
                   kind = "circulant";
                   w.put("c", f.c);
                 },
                 [&](const ToeplitzForm& f) {
                   kind = "toeplitz";
                   w.put("t1", f.t1);
                   w.put("t2", f.t2);
                 },
                 [&](const HankelForm& f) {
                   kind = "hankel";
                   w.put("h", f.h);
                 },
                 [&](const DisplacementForm& f) {
                   kind = "toeplitz_like";
                   w.put("G", f.G);
                   w.put("H", f.H);
                   w.put("dense", f.dense);
                 },
                 [&](const LowRankForm& f) {
                   kind = "lowrank";
                   w.put("U", f.U);
                   w.put("V", f.V);
                 },
                 [&](const DenseForm& f) {
                   kind = "dense";
                   w.put("A", f.A);
                 },
                 [&](const HssForm& f) {
                   kind = "hss";
                   w.put("n", f.n);
                   w.put("rank", f.rank);
                   w.put("leaf", f.leaf);
                   w.put("symmetric", std::int64_t(f.symmetric));
                   w.put("U", f.U);
                   w.put("V", f.V);
                   w.put("W", f.W);
                   w.put("Z", f.Z);
                   w.put("nodes", Index(f.h12.size()));
                   for (Index i = 0; i < Index(f.h12.size()); ++i) {
                     w.put(key("h12", i), f.h12[i]);
                     w.put(key("h21", i), f.h21[i]);
                   }
                   w.put("leaves", Index(f.leaves.size()));
                   for (Index i = 0; i < Index(f.leaves.size()); ++i) w.put(key("leaf", i), f.leaves[i]);
                 },
                 [&](const HodlrForm& f) {
                   kind = "hodlr";
                   w.put("n", f.n);
                   w.put("logical_n", f.logical_n);
                   w.put("offset", f.offset);
                   w.put("leaf", f.leaf);
                   w.put("symmetric", std::int64_t(f.symmetric));
                   w.put("levels", Index(f.levels.size()));
                   for (Index l = 0; l < Index(f.levels.size()); ++l) {
                     w.put(key("nodes", l), Index(f.levels[l].size()));
                     for (Index j = 0; j < Index(f.levels[l].size()); ++j) {
                       const HodlrNode& nd = f.levels[l][j];
                       w.put(key("U", l, j), nd.U);
                       w.put(key("V", l, j), nd.V);
                       w.put(key("W", l, j), nd.W);
                       w.put(key("Z", l, j), nd.Z);
                     }
                   }
                   w.put("leaves", Index(f.leaves.size()));
                   for (Index i = 0; i < Index(f.leaves.size()); ++i) w.put(key("leaf", i), f.leaves[i]);
                 },
             },
             form);
  w.write(out, kind, seed);
}

LoadedForm load_form(std::istream& in) {
  Reader r(in);
  LoadedForm out;
  out.seed = r.seed;
  const std::string& k = r.kind;
  if (k == "diagonal") {
    out.form = DiagonalForm{r.vector("d")};
  } else if (k == "tridiagonal") {
    out.form = TridiagonalForm{r.vector("main"), r.vector("sub"), r.vector("super"), r.integer("symmetric") != 0};
  } else if (k == "circulant") {
    out.form = CirculantForm{r.vector("c")};
  } else if (k == "toeplitz") {
    out.form = ToeplitzForm{r.vector("t1"), r.vector("t2")};
  } else if (k == "hankel") {
    out.form = HankelForm{r.vector("h")};
  } else if (k == "toeplitz_like") {
    out.form = DisplacementForm{r.matrix("G"), r.matrix("H"), r.matrix("dense")};
  } else if (k == "lowrank") {
    out.form = LowRankForm{r.matrix("U"), r.matrix("V")};
  } else if (k == "dense") {
    out.form = DenseForm{r.matrix("A")};
  } else if (k == "hss") {
    HssForm f;
    f.n = r.integer("n");
    f.rank = r.integer("rank");
    f.leaf = r.integer("leaf");
    f.symmetric = r.integer("symmetric") != 0;
    f.U = r.matrix("U");
    f.V = r.matrix("V");
    f.W = r.matrix("W");
    f.Z = r.matrix("Z");
    for (Index i = 0; i < r.integer("nodes"); ++i) {
      f.h12.push_back(r.matrix(key("h12", i)));
      f.h21.push_back(r.matrix(key("h21", i)));
    }
    for (Index i = 0; i < r.integer("leaves"); ++i) f.leaves.push_back(r.matrix(key("leaf", i)));
    out.form = std::move(f);
  } else if (k == "hodlr") {
    HodlrForm f;
    f.n = r.integer("n");
    f.logical_n = r.integer("logical_n");
    f.offset = r.integer("offset");
    f.leaf = r.integer("leaf");
    f.symmetric = r.integer("symmetric") != 0;
    for (Index l = 0; l < r.integer("levels"); ++l) {
      std::vector<HodlrNode> nodes;
      for (Index j = 0; j < r.integer(key("nodes", l)); ++j)
        nodes.push_back({r.matrix(key("U", l, j)), r.matrix(key("V", l, j)), r.matrix(key("W", l, j)),
                         r.matrix(key("Z", l, j))});
      f.levels.push_back(std::move(nodes));
    }
    for (Index i = 0; i < r.integer("leaves"); ++i) f.leaves.push_back(r.matrix(key("leaf", i)));
    out.form = std::move(f);
  } else {
    throw IoError("load_form: unknown kind '" + k + "'");
  }
  return out;
}

void save_form_file(const std::string& path, const StructuredForm& form, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save_form(out, form, seed);
}

LoadedForm load_form_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_form(in);
}

}  // namespace mvr
