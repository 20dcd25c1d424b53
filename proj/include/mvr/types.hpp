#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mvr {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

struct Range {
  Index begin = 0;
  Index size = 0;
  Index end() const { return begin + size; }
};

enum class ErrorKind {
  shape,
  config,
  ill_conditioned,
  under_determined,
  degeneracy,
  singular_pencil,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error(ErrorKind::shape, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};
struct IllConditionedError : Error {
  explicit IllConditionedError(const std::string& w) : Error(ErrorKind::ill_conditioned, w) {}
};
struct UnderDeterminedError : Error {
  explicit UnderDeterminedError(const std::string& w) : Error(ErrorKind::under_determined, w) {}
};
struct DegeneracyError : Error {
  explicit DegeneracyError(const std::string& w) : Error(ErrorKind::degeneracy, w) {}
};
struct SingularPencilError : Error {
  explicit SingularPencilError(const std::string& w) : Error(ErrorKind::singular_pencil, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline int log2_exact(Index n) {
  int l = 0;
  while ((Index(1) << l) < n) ++l;
  return l;
}

}  // namespace mvr
