#pragma once

#include "mvr/random.hpp"
#include "mvr/types.hpp"

#include <utility>

namespace mvr {

// Q1 diag(rho^j) and Q2 with orthonormal Q1 (rows x width), Q2 (cols x width).
std::pair<Matrix, Matrix> decay_factor_pair(GaussianStream& g, Index rows, Index cols, Index width, double rho);

}  // namespace mvr
