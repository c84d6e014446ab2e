#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jdpp/space.hpp"
#include "jdpp/types.hpp"

namespace jdpp {

/// Linear operator on the weighted sequence space, stored in weight-absorbed
/// ("flat") coordinates:
///
///   F_ij = sqrt(sigma_i) * K(x_i, x_j) * sqrt(sigma_j)
///
/// so adjoints, traces, eigenvalues and sub-determinants of the operator
/// coincide with the plain matrix operations on F. Pointwise kernel values
/// are a view. For any subset S, det(F_S) equals the correlation weight
/// integral det[K(x_i,x_j)]_{S} * prod_{i in S} sigma_i.
struct Kernel {
  SpacePartition space;
  Matrix flat;  // d x d

  int d() const { return space.d; }
  cplx pointwise(int i, int j) const {
    return flat(i, j) / (space.sqrt_sigma(i) * space.sqrt_sigma(j));
  }
  Matrix pointwise_matrix() const;
};

Kernel make_kernel_flat(const SpacePartition& space, Matrix flat);
Kernel make_kernel_pointwise(const SpacePartition& space, const Matrix& values);

/// Diagonal 0/1 projection onto part 1 or 2, flat coordinates.
Matrix part_projection(const SpacePartition& space, int which);

/// Diagonal 0/1 projection onto a site subset.
Matrix subset_projection(const SpacePartition& space, std::uint64_t delta);

/// K |-> K*P1 + (1-K)*P2. An involution, exact up to the subtraction it
/// performs on the X2 columns (no other arithmetic touches the entries).
/// Block form of the image: [[K11, -K12], [K21, 1-K22]].
Kernel hat_transform(const Kernel& k);

struct ValidationReport {
  double hermiticity_residual = 0;  // ||K - K^*||_F, flat
  double min_eigenvalue = 0;
  double max_eigenvalue = 0;
  double tol = kDefaultTol;
  bool hermitian = false;
  bool bounds_ok = false;
  bool pass = false;
  // Finite dimension: every operator is trace class on both parts, so the
  // local-trace-class hypotheses hold automatically.
  bool locally_trace_class = true;
  std::string note;
};

/// Hermiticity and 0 <= K <= 1, within tol.
ValidationReport validate_correlation_operator(const Kernel& k, double tol = kDefaultTol);

struct SqrtFactors {
  Kernel k1;  // sqrt(K)
  Kernel k2;  // sqrt(1-K)
};

/// Square roots through the eigendecomposition of the flat matrix.
/// Eigenvalues within tol outside [0,1] are clamped before the root;
/// anything further out is a validation error.
SqrtFactors sqrt_factors(const Kernel& k, double tol = kDefaultTol);

struct JsaReport {
  bool ok = false;
  double res_block11 = 0;  // ||(M11)^* - M11||_F
  double res_block22 = 0;
  double res_cross = 0;  // ||(M21)^* + M12||_F
  double max_residual = 0;
};

/// J-self-adjointness of a flat matrix: Hermitian diagonal blocks,
/// anti-Hermitian coupling ((M21)^* = -M12); equivalently J M J = M^*.
JsaReport check_j_self_adjoint(const Kernel& m, double tol = kDefaultTol);

struct BundleCertificate {
  ValidationReport base;
  double sqrt_residual_k1 = 0;  // ||K1^2 - K||_F
  double sqrt_residual_k2 = 0;  // ||K2^2 - (1-K)||_F
  double block11_residual = 0;  // ||(K1^2)_{11} - Khat_{11}||_F on X1 x X1
  double block22_residual = 0;  // ||(K2^2)_{22} - Khat_{22}||_F on X2 x X2
  double block21_residual = 0;  // ||Khat_{21} - K_{21}||_F
  double block12_residual = 0;  // ||Khat_{12} + (K_{21})^*||_F
  double hat_involution_residual = 0;
  JsaReport jsa;  // for Khat
  bool pass = false;
  std::string note;
};

/// The tuple (K, Khat, K1, K2) with validity certificates. Khat is the
/// J-self-adjoint partner obtained by the hat transform.
struct JKernelBundle {
  Kernel K;
  Kernel Khat;
  Kernel K1;
  Kernel K2;
  double tol = kDefaultTol;
  BundleCertificate cert;

  int d() const { return K.d(); }
  const SpacePartition& space() const { return K.space; }
};

/// Validates K, builds the square-root factors and Khat, and certifies the
/// block identities (Khat diagonal blocks equal the one-sided K_i^2 blocks,
/// Khat_{21} = K_{21}, Khat_{12} = -(K_{21})^*). Throws on validation
/// failure beyond tol.
JKernelBundle assemble_j_kernel(const Kernel& k, double tol = kDefaultTol);

/// det of the pointwise submatrix [Khat(x_i, x_j)] over the given sites.
/// Sites must be distinct (0-based); the imaginary part of the determinant
/// is discarded after an internal sanity bound.
double correlation_determinant(const Kernel& khat, const std::vector<int>& sites);

struct GrowthConstant {
  double general = 0;  // max{ tr-norm sum over the two diagonal blocks, ||.||_2, ||.|| }
  std::optional<double> refined;  // one-sided Delta only
  double trace_norm_sum = 0;
  double frobenius_norm = 0;
  double operator_norm = 0;
};

/// Moment growth constant C_Delta of the restriction Khat_Delta. For Delta
/// contained in a single part the refined constant
/// sum_{i in Delta, j} |K_i(x_i, x_j)|^2 sigma_i sigma_j is also reported.
/// Empty Delta yields 0.
GrowthConstant growth_bound_constant(const JKernelBundle& bundle, std::uint64_t delta);

}  // namespace jdpp
