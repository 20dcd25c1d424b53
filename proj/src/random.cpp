#include "mvr/random.hpp"

#include <cmath>
#include <numbers>

namespace mvr {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t random_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ stream) ^ counter);
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  // 53 random bits, shifted by half an ulp so the result lies in (0, 1).
  std::uint64_t b = random_bits(seed, stream, counter) >> 11;
  return (static_cast<double>(b) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  // Box-Muller on the pair (2j, 2j+1); even counters take the cosine branch.
  std::uint64_t pair = counter >> 1;
  double u1 = uniform01(seed, stream, 2 * pair);
  double u2 = uniform01(seed, stream, 2 * pair + 1);
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  return (counter & 1) ? r * std::sin(t) : r * std::cos(t);
}

std::uint64_t substream(std::uint64_t stream, std::uint64_t tag) {
  return mix64(stream * 0x100000001B3ULL + tag);
}

Matrix GaussianStream::matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = next();
  return m;
}

Matrix GaussianStream::symmetric(Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      m(i, j) = next();
      m(j, i) = m(i, j);
    }
  return m;
}

}  // namespace mvr
