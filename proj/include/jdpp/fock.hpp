#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "jdpp/types.hpp"

namespace jdpp {

class Rng;

/// Antisymmetric Fock space over G = H (+) H for a d-site space.
///
/// Modes 0..d-1 carry copy 1 of H, modes d..2d-1 copy 2. The occupation
/// basis packs mode k into bit k of the basis index; the vacuum is index 0.
/// Jordan-Wigner sign convention (fixed, sign-sensitive tests pin it):
///
///   a+_k |n> = (-1)^{popcount(n & ((1<<k)-1))} |n with bit k set>,
///   zero when bit k is already set.
struct FockSpace {
  int sites = 0;
  int modes = 0;
  std::size_t dim = 0;

  /// Dense operator matrices are permitted only up to this many modes
  /// (dim 1024); beyond it, use the matrix-free appliers below.
  static constexpr int kDenseModeCap = 10;

  explicit FockSpace(int d);
  bool dense_ok() const { return modes <= kDenseModeCap; }
};

using FockVector = Vector;

FockVector vacuum(const FockSpace& fs);

/// Dense operator plus a symbolic identity multiple, so trace scalars never
/// materialize a dense identity. Immutable value type; dimension-checked
/// arithmetic.
class FockOperator {
 public:
  FockOperator() = default;

  static FockOperator zero(const FockSpace& fs);
  static FockOperator scalar(const FockSpace& fs, cplx c);
  static FockOperator from_matrix(Matrix m, cplx id = cplx(0.0));

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const Matrix& matrix_part() const { return mat_; }
  cplx identity_part() const { return id_; }
  Matrix materialized() const;

  FockVector apply(const FockVector& v) const;
  FockOperator adjoint() const;
  cplx vacuum_expectation() const { return mat_(0, 0) + id_; }

  /// Set when the construction guarantees Hermiticity (e.g. rho(Delta),
  /// Wick products); unknown otherwise.
  std::optional<bool> hermitian;

  FockOperator operator+(const FockOperator& o) const;
  FockOperator operator-(const FockOperator& o) const;
  FockOperator operator*(const FockOperator& o) const;
  FockOperator operator*(cplx c) const;
  FockOperator& operator+=(const FockOperator& o);
  FockOperator& operator-=(const FockOperator& o);

  /// Frobenius norm of the full operator including the identity part.
  double frobenius_norm() const;

 private:
  Matrix mat_;  // dim x dim
  cplx id_ = 0.0;
};

// ---------------------------------------------------------------------------
// Matrix-free primitive appliers: out += op * in. These work at any
// dimension and are the only path above the dense cap.
// ---------------------------------------------------------------------------

/// a+(g) = sum_k g_k a+_k, g in C^{2d}.
void apply_creation(const FockSpace& fs, const Vector& g, const FockVector& in, FockVector& out);

/// a-(g) = (a+(g))^* = sum_k conj(g_k) a-_k.
void apply_annihilation(const FockSpace& fs, const Vector& g, const FockVector& in,
                        FockVector& out);

/// a+(c) = sum_{k,l} c_{kl} a+_k a+_l for a coefficient tensor c on G (x) G.
/// The symmetric part of c annihilates.
void apply_pair_creation(const FockSpace& fs, const Matrix& c, const FockVector& in,
                         FockVector& out);

/// Adjoint of apply_pair_creation: sum_{k,l} conj(c_{kl}) a-_l a-_k.
void apply_pair_annihilation(const FockSpace& fs, const Matrix& c, const FockVector& in,
                             FockVector& out);

/// dGamma(B) = sum_{k,l} B_{kl} a+_k a-_l, B on G.
void apply_second_quantization(const FockSpace& fs, const Matrix& b, const FockVector& in,
                               FockVector& out);

// ---------------------------------------------------------------------------
// Dense builders (throw when the space exceeds the dense cap).
// ---------------------------------------------------------------------------

FockOperator creation(const FockSpace& fs, const Vector& g);
FockOperator annihilation(const FockSpace& fs, const Vector& g);
FockOperator pair_creation(const FockSpace& fs, const Matrix& c);
FockOperator second_quantization(const FockSpace& fs, const Matrix& b);

/// Vacuum matrix element (op Omega, Omega). For operators flagged
/// Hermitian the imaginary part is required to stay below 1e-12.
cplx vacuum_expectation(const FockOperator& op);

/// Operator-norm estimate by power iteration on A^* A, for norm checks on
/// spaces where dense matrices are off limits.
double power_iteration_norm(std::size_t dim,
                            const std::function<FockVector(const FockVector&)>& apply,
                            const std::function<FockVector(const FockVector&)>& apply_adjoint,
                            Rng& rng, int iterations = 60);

}  // namespace jdpp
