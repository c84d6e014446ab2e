#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "jdpp/fock.hpp"
#include "jdpp/kernel.hpp"

namespace jdpp {

/// Field operator of the shape a+(u) + a-(v) with u, v in G = C^{2d}.
/// Every representation used here (elementary, gauge-invariant, Bogoliubov)
/// lands in this class, and it is closed under sums and adjoints.
struct FieldOp {
  Vector u;  // creator component
  Vector v;  // annihilator component

  FieldOp adjoint() const { return FieldOp{v, u}; }
  FieldOp operator+(const FieldOp& o) const { return FieldOp{u + o.u, v + o.v}; }

  /// out += (a+(u) + a-(v)) in
  void apply_accumulate(const FockSpace& fs, const FockVector& in, FockVector& out) const;
  FockVector apply(const FockSpace& fs, const FockVector& in) const;
  FockOperator to_operator(const FockSpace& fs) const;
};

struct FieldPair {
  FieldOp plus;
  FieldOp minus;
};

/// Gauge-invariant pair: calA+(phi) = a+_2(K2 phi) + a-_1(C K1 phi) and its
/// adjoint. Vacuum two-point function tau(calA+(phi) calA-(psi)) = (K phi, psi).
FieldPair gauge_fields(const JKernelBundle& bundle, const Vector& phi, const FockSpace& fs);

/// Bogoliubov-transformed pair, built from the defining relation
/// A+(phi) = calA+(P1 phi) + calA-(P2 C phi); acts as the gauge pair on X1
/// and swaps creation/annihilation on X2.
FieldPair bogoliubov_fields(const JKernelBundle& bundle, const Vector& phi, const FockSpace& fs);

enum class RhoForm { definition, series };

/// Smeared particle density rho(Delta) of the Bogoliubov representation.
///
/// definition: a+((K2 J_D K1)_{2,1}) + its adjoint
///             + dGamma(conj(-K1 J_D K1) (+) K2 J_D K2)
///             + (tr Khat_{D cap X1} + tr Khat_{D cap X2}) * 1,
///             with J_D = P_{D cap X1} - P_{D cap X2}.
/// series:     the basis double sum, an independent construction route.
FockOperator rho_delta(const JKernelBundle& bundle, std::uint64_t delta, const FockSpace& fs,
                       RhoForm form = RhoForm::definition);

/// Matrix-free rho(Delta) application (definition form); works above the
/// dense cap.
FockVector rho_apply(const JKernelBundle& bundle, std::uint64_t delta, const FockSpace& fs,
                     const FockVector& in);

/// W(Delta, R), the one-step Wick extension: sandwiches R between the mode
/// operators of the rho series. W(Delta, 1) = rho(Delta), and
/// rho(D1) W(D2, R) = W(D2, rho(D1) R) + W(D1 cap D2, R).
FockOperator w_op(const JKernelBundle& bundle, std::uint64_t delta, const FockOperator& r,
                  const FockSpace& fs);

enum class WickRoute { recurrence, w_chain };

/// Wick (normal) product :rho(D1)...rho(Dn):.
///
/// recurrence: the subtraction recurrence
///   :rho(D1)...rho(D_{n+1}): = rho(D_{n+1_}) :rho(D1)...rho(Dn):
///       - sum_i :rho(D1)...rho(Di cap D_{n+1})...rho(Dn):
/// w_chain: iterated W(Dn, .). Both routes agree and are symmetric under
/// permutations of the arguments.
FockOperator wick_product(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas,
                          const FockSpace& fs, WickRoute route = WickRoute::recurrence);

/// Wick/moment evaluator with caching across Delta-multisets; for sweeps of
/// many tuples over one bundle. Wick values are cached on the sorted key
/// (the product is permutation-symmetric).
class WickEngine {
 public:
  WickEngine(const JKernelBundle& bundle, const FockSpace& fs);

  const FockOperator& rho(std::uint64_t delta);
  const FockOperator& wick(const std::vector<std::uint64_t>& deltas);

  /// tau(rho(D1)...rho(Dn)) via vector applications onto the vacuum.
  cplx plain_moment(const std::vector<std::uint64_t>& deltas);

  const JKernelBundle& bundle() const { return *bundle_; }
  const FockSpace& fock() const { return *fs_; }

 private:
  const JKernelBundle* bundle_;
  const FockSpace* fs_;
  std::map<std::uint64_t, FockOperator> rho_cache_;
  std::map<std::vector<std::uint64_t>, FockOperator> wick_cache_;
};

}  // namespace jdpp
