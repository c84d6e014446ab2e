#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jdpp/fields.hpp"
#include "jdpp/kernel.hpp"

namespace jdpp {

// Feasibility caps, enforced with named errors.
inline constexpr int kMaxCycleMomentOrder = 8;
inline constexpr int kMaxDeterminantMomentOrder = 6;
inline constexpr long long kMaxDeterminantTuples = 1'000'000;
inline constexpr int kMaxFockMomentOrder = 4;
inline constexpr int kMaxPairingOrder = 3;
inline constexpr int kMaxPairingSites = 3;
inline constexpr int kMaxPairPartitionPoints = 12;

/// Pair partition of {0, ..., 2n-1} with its crossing number: the count of
/// pair pairs {i,j},{k,l} with i < k < j < l.
struct PairPartition {
  std::vector<std::pair<int, int>> pairs;  // first < second
  int crossings = 0;
};

/// All (n2-1)!! pair partitions of {0,...,n2-1}. n2 even, at most 12.
std::vector<PairPartition> pair_partitions(int n2);

enum class FieldSign : char { minus = 0, plus = 1 };

/// Vacuum expectation of a^{s_1}(g_1) ... a^{s_L}(g_L) for elementary CAR
/// operators over G, evaluated as the quasi-free pairing sum
///   sum_nu (-1)^{Cross(nu)} prod_{(i,j) in nu, i<j} (g_j, g_i)_G
/// over partitions pairing a minus at the smaller index with a plus at the
/// larger. Odd length or unbalanced signs give 0.
cplx quasi_free_expectation(std::span<const Vector> vectors, std::span<const FieldSign> signs);

/// n-th Wick moment tau(:rho(D1)...rho(Dn):) through the permutation
/// cycle-trace formula on the flat Khat matrix: 1-cycles contribute the
/// split trace tr(Khat_{D cap X1}) + tr(Khat_{D cap X2}), longer cycles the
/// matrix-product trace tr(P_{D_{l1}} Khat P_{D_{l2}} Khat ...).
/// Permutations are enumerated in lexicographic order.
double cycle_trace_moment(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas);

/// Same moment as the exhaustive sum over site tuples of
/// det[Khat(x_i,x_j)] * prod sigma; tuples with a repeated site are skipped
/// (their determinant vanishes analytically).
double determinant_moment_sum(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas);

/// theta^(n)(D1 x ... x Dn) = tau(:rho(D1)...rho(Dn):)/n! through the Fock
/// route.
double correlation_measure(WickEngine& engine, const std::vector<std::uint64_t>& deltas);
double correlation_measure(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas,
                           const FockSpace& fs);

/// Third, oracle-grade route: the finite c-coefficient expansion of the
/// Wick moment with quasi_free_expectation for the inner vacuum
/// expectations. Capped hard at n <= 3, d <= 3.
double pairing_expansion_moment(const JKernelBundle& bundle,
                                std::span<const std::uint64_t> deltas);

/// T^(2)(phi,psi) = tau(b(phi) b(psi)) for b = A+ + A-.
/// Closed form: 2i Im(K JJ phi, JJ psi) + (JJ psi, JJ phi), JJ = P1 + P2 C.
cplx two_point_T_closed(const JKernelBundle& bundle, const Vector& phi, const Vector& psi);
cplx two_point_T_fock(const JKernelBundle& bundle, const Vector& phi, const Vector& psi,
                      const FockSpace& fs);

/// S^(m,n) = tau(A+(phi_1)...A+(phi_m) A-(psi_1)...A-(psi_n)); exact 0 for
/// odd m+n. Caps m+n <= 6.
cplx npoint_S_fock(const JKernelBundle& bundle, std::span<const Vector> phis,
                   std::span<const Vector> psis, const FockSpace& fs);

/// Closed two-point forms of the non-gauge-invariant state. On the X2 block
/// they carry the entrywise conjugate of the kernel; for real kernels this
/// coincides with the unconjugated expression.
cplx npoint_S_closed_11(const JKernelBundle& bundle, const Vector& phi, const Vector& psi);
cplx npoint_S_closed_20(const JKernelBundle& bundle, const Vector& phi, const Vector& psi);
cplx npoint_S_closed_02(const JKernelBundle& bundle, const Vector& phi, const Vector& psi);

struct GrowthCheck {
  std::uint64_t delta = 0;
  int n_max = 0;
  GrowthConstant constant;
  std::vector<double> theta;            // theta^(n)(Delta^n), n = 1..n_max
  std::vector<double> bound_general;    // general^n
  std::vector<double> bound_refined;    // refined^n, empty for two-sided Delta
  double slack = 1e-9;                  // n = 1 can hold with exact equality
  bool ok = false;
};

/// Verifies theta^(n)(Delta^n) <= C_Delta^n for n <= n_max. Uses the Fock
/// route when a space is supplied and n is small enough, the cycle route
/// otherwise.
GrowthCheck growth_bound_check(const JKernelBundle& bundle, std::uint64_t delta, int n_max,
                               const FockSpace* fs = nullptr);

/// One Delta-tuple, every available route, and the largest pairwise gap.
struct MomentReport {
  std::vector<std::uint64_t> deltas;
  double value_fock = 0;
  double value_cycle = 0;
  double value_det = 0;
  std::optional<double> value_pairing;
  double max_discrepancy = 0;
};

MomentReport moment_report(WickEngine& engine, const std::vector<std::uint64_t>& deltas,
                           bool want_pairing);

}  // namespace jdpp
