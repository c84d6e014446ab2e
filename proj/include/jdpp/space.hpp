#pragma once

#include <cstdint>
#include <vector>

#include "jdpp/types.hpp"

namespace jdpp {

/// Finite ground set {x_1, ..., x_d} with positive quadrature weights and a
/// two-block partition into X1 and X2. Degenerate partitions (one block
/// empty) are allowed.
///
/// Site x_i is externally 1-based; subset bitmasks put x_i on bit i-1, and
/// all in-memory indices are 0-based. Immutable after construction.
struct SpacePartition {
  int d = 0;
  RealVector sigma;       // weights, all > 0
  std::vector<int> part;  // 1 or 2 per site
  RealVector sqrt_sigma;
  std::uint64_t mask1 = 0;  // sites in X1
  std::uint64_t mask2 = 0;  // sites in X2

  std::uint64_t full_mask() const { return d >= 64 ? ~0ull : (1ull << d) - 1ull; }
  bool in_part(int site, int which) const { return part[static_cast<std::size_t>(site)] == which; }
};

/// Validates lengths and positivity; throws on violation.
SpacePartition build_space(int d, const RealVector& sigma, const std::vector<int>& part);

/// All weights 1.0.
SpacePartition uniform_space(int d, const std::vector<int>& part);

std::vector<int> mask_to_sites(std::uint64_t mask, int d);
std::uint64_t sites_to_mask(const std::vector<int>& sites, int d);

}  // namespace jdpp
