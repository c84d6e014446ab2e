#include "jdpp/space.hpp"

#include <cmath>

#include "jdpp/errors.hpp"

namespace jdpp {

SpacePartition build_space(int d, const RealVector& sigma, const std::vector<int>& part) {
  require(d >= 1, Errc::invalid_argument, "space needs at least one site");
  require(d <= 63, Errc::infeasible_size, "site count exceeds bitmask capacity (63)");
  require(sigma.size() == d, Errc::dimension_mismatch, "sigma length does not match d");
  require(static_cast<int>(part.size()) == d, Errc::dimension_mismatch,
          "part length does not match d");

  SpacePartition s;
  s.d = d;
  s.sigma = sigma;
  s.part = part;
  s.sqrt_sigma.resize(d);
  for (int i = 0; i < d; ++i) {
    require(sigma(i) > 0.0, Errc::invalid_argument, "nonpositive weight at site " + std::to_string(i + 1));
    require(part[static_cast<std::size_t>(i)] == 1 || part[static_cast<std::size_t>(i)] == 2,
            Errc::invalid_argument, "part labels must be 1 or 2");
    s.sqrt_sigma(i) = std::sqrt(sigma(i));
    if (part[static_cast<std::size_t>(i)] == 1)
      s.mask1 |= (1ull << i);
    else
      s.mask2 |= (1ull << i);
  }
  return s;
}

SpacePartition uniform_space(int d, const std::vector<int>& part) {
  return build_space(d, RealVector::Ones(d), part);
}

std::vector<int> mask_to_sites(std::uint64_t mask, int d) {
  std::vector<int> out;
  for (int i = 0; i < d; ++i)
    if ((mask >> i) & 1ull) out.push_back(i);
  return out;
}

std::uint64_t sites_to_mask(const std::vector<int>& sites, int d) {
  std::uint64_t mask = 0;
  for (int i : sites) {
    require(i >= 0 && i < d, Errc::invalid_argument, "site index out of range");
    mask |= (1ull << i);
  }
  return mask;
}

}  // namespace jdpp
