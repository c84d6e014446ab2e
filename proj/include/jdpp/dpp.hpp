#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jdpp/kernel.hpp"

namespace jdpp {

inline constexpr int kMaxTableSites = 12;  // 2^d table entries, 3^d inversion work

/// Exact distribution of a finite determinantal point process over all 2^d
/// subsets of the ground set. probs[mask] with site x_i on bit i-1; entries
/// are clamped at 0 with the worst negative excursion recorded.
struct DppTable {
  SpacePartition space;
  std::vector<double> probs;
  double clamp_residual = 0;
  Kernel kernel;  // the generating kernel

  double prob(std::uint64_t mask) const { return probs[static_cast<std::size_t>(mask)]; }
};

/// Correlation weight P(Y contains S) = det(F_S) of the flat matrix.
double correlation_weight(const Kernel& k, std::uint64_t subset);

/// Subset probabilities by Moebius inversion over correlation weights:
/// P(Y = S) = sum_{A superset S} (-1)^{|A \ S|} det(F_A).
/// Negative excursions beyond -1e-9 abort (invalid kernel); smaller ones
/// are clamped to 0 and recorded.
DppTable dpp_distribution(const Kernel& k);

/// Pushforward under the particle-hole involution
/// I(gamma) = (gamma cap X1) union (X2 \ gamma); bit-exact, an involution.
DppTable particle_hole_pushforward(const DppTable& table);

/// Distribution with the J-self-adjoint correlation kernel Khat of the
/// bundle: the pushforward of the DPP generated by K. Its correlation
/// weights are det(Khat_S) for every subset.
DppTable j_dpp_distribution(const JKernelBundle& bundle);

/// sum_S P(S) * prod_i |S cap Delta_i| -- the point-process side of the
/// moment identity.
double moments_by_enumeration(const DppTable& table, std::span<const std::uint64_t> deltas);

/// sum_{A superset S} P(A) = E[ prod_{x in S} 1{x in Y} ].
double correlation_from_distribution(const DppTable& table, std::uint64_t subset);

/// Exact HKPV sampling: Bernoulli selection of eigenvectors, then
/// sequential projection sampling with Schur-complement updates.
/// Deterministic per (seed, draw index): draw i uses the RNG substream
/// split(i) of the seed, so batches are reproducible and order-independent.
std::vector<std::uint64_t> hkpv_sample(const Kernel& k, std::uint64_t seed, int count);

}  // namespace jdpp
