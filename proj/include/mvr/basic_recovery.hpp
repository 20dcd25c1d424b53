#pragma once

#include "mvr/oracle.hpp"
#include "mvr/structured.hpp"

namespace mvr {

enum class TridiagonalMode { recursive, comb };
enum class ProbeMode { deterministic, randomized };

DiagonalForm recover_diagonal(const Oracle& oracle);

// Block-diagonal with k x k blocks; k queries.
DenseForm recover_block_diagonal(const Oracle& oracle, Index k);

// recursive: two forward probes plus one transpose probe; comb: three forward probes.
TridiagonalForm recover_tridiagonal(const Oracle& oracle, TridiagonalMode mode);
TridiagonalForm recover_symmetric_tridiagonal(const Oracle& oracle);

CirculantForm recover_circulant(const Oracle& oracle, ProbeMode mode, std::uint64_t seed = 0);

// Coefficients of T g in the unknowns (t1 top to bottom, then t2 from the
// last entry down to the second).
Matrix toeplitz_probe_rows(const Vector& g);
ToeplitzForm toeplitz_from_unknowns(const Vector& a);

ToeplitzForm recover_toeplitz(const Oracle& oracle, ProbeMode mode, std::uint64_t seed = 0);
HankelForm recover_hankel(const Oracle& oracle, std::uint64_t seed = 0);

DisplacementForm recover_toeplitz_like(const Oracle& oracle, Index p = 5, std::uint64_t seed = 0);

}  // namespace mvr
