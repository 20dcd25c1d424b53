#pragma once

#include "mvr/types.hpp"

namespace mvr {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so results do not depend on call order
// across streams or on the standard library implementation.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t random_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

// Derive a child stream id from a parent and a small tag.
std::uint64_t substream(std::uint64_t stream, std::uint64_t tag);

class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double next() { return standard_normal(seed_, stream_, counter_++); }
  Matrix matrix(Index rows, Index cols);
  Vector vector(Index n) { return matrix(n, 1).col(0); }
  // Symmetric matrix with i.i.d. upper triangle (diagonal included).
  Matrix symmetric(Index n);
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Stream ids used by the library; distinct routines never share a stream.
namespace streams {
constexpr std::uint64_t generator = 0x1000;
constexpr std::uint64_t noise = 0x2000;
constexpr std::uint64_t circulant = 0x3000;
constexpr std::uint64_t toeplitz = 0x3100;
constexpr std::uint64_t toeplitz_like = 0x3200;
constexpr std::uint64_t sketch = 0x4000;
constexpr std::uint64_t hss = 0x5000;
constexpr std::uint64_t hodlr = 0x6000;
constexpr std::uint64_t power = 0x7000;
constexpr std::uint64_t witness = 0x8000;
}  // namespace streams

}  // namespace mvr
