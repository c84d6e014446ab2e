#pragma once

#include <cstdint>

#include "jdpp/kernel.hpp"

namespace jdpp {

/// Seeded random Hermitian matrix with eigenvalues mapped into [0,1]
/// through the logistic function. Generated directly in flat coordinates.
Kernel random_valid_kernel(const SpacePartition& space, std::uint64_t seed);

/// Seeded rank-r orthogonal projection, 0 <= r <= d.
Kernel projection_kernel(const SpacePartition& space, int rank, std::uint64_t seed);

/// Pointwise sine kernel K(x_i,x_j) = sin(pi a (i-j)) / (pi (i-j)) with
/// diagonal a, then eigenvalues clipped into [0,1] so the result validates.
Kernel discrete_sine_kernel(const SpacePartition& space, double a);

}  // namespace jdpp
