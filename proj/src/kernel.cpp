#include "jdpp/kernel.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "jdpp/errors.hpp"

namespace jdpp {

Matrix Kernel::pointwise_matrix() const {
  const int n = d();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = pointwise(i, j);
  return out;
}

Kernel make_kernel_flat(const SpacePartition& space, Matrix flat) {
  require(flat.rows() == space.d && flat.cols() == space.d, Errc::dimension_mismatch,
          "kernel matrix does not match space dimension");
  return Kernel{space, std::move(flat)};
}

Kernel make_kernel_pointwise(const SpacePartition& space, const Matrix& values) {
  require(values.rows() == space.d && values.cols() == space.d, Errc::dimension_mismatch,
          "kernel matrix does not match space dimension");
  Matrix flat(space.d, space.d);
  for (int i = 0; i < space.d; ++i)
    for (int j = 0; j < space.d; ++j)
      flat(i, j) = values(i, j) * space.sqrt_sigma(i) * space.sqrt_sigma(j);
  return Kernel{space, std::move(flat)};
}

Matrix part_projection(const SpacePartition& space, int which) {
  Matrix p = Matrix::Zero(space.d, space.d);
  for (int i = 0; i < space.d; ++i)
    if (space.part[static_cast<std::size_t>(i)] == which) p(i, i) = 1.0;
  return p;
}

Matrix subset_projection(const SpacePartition& space, std::uint64_t delta) {
  Matrix p = Matrix::Zero(space.d, space.d);
  for (int i = 0; i < space.d; ++i)
    if ((delta >> i) & 1ull) p(i, i) = 1.0;
  return p;
}

Kernel hat_transform(const Kernel& k) {
  const int n = k.d();
  Matrix out = k.flat;
  for (int j = 0; j < n; ++j) {
    if (k.space.part[static_cast<std::size_t>(j)] == 2) {
      out.col(j) = -k.flat.col(j);
      out(j, j) += 1.0;
    }
  }
  return Kernel{k.space, std::move(out)};
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eigen(const Matrix& f) {
  Matrix h = 0.5 * (f + f.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  require(es.info() == Eigen::Success, Errc::validation_failure, "eigendecomposition failed");
  return es;
}

}  // namespace

ValidationReport validate_correlation_operator(const Kernel& k, double tol) {
  ValidationReport r;
  r.tol = tol;
  r.hermiticity_residual = (k.flat - k.flat.adjoint()).norm();
  r.hermitian = r.hermiticity_residual <= tol;

  auto es = hermitian_eigen(k.flat);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.max_eigenvalue = es.eigenvalues().maxCoeff();
  r.bounds_ok = r.min_eigenvalue >= -tol && r.max_eigenvalue <= 1.0 + tol;

  r.pass = r.hermitian && r.bounds_ok;
  r.locally_trace_class = true;
  r.note =
      "finite dimension: restrictions to X1 and X2 are trace class automatically; "
      "diagonal kernel values are determined by the flat matrix";
  return r;
}

SqrtFactors sqrt_factors(const Kernel& k, double tol) {
  const ValidationReport v = validate_correlation_operator(k, tol);
  require(v.pass, Errc::validation_failure,
          "sqrt_factors: operator fails 0<=K<=1 validation (hermiticity residual " +
              std::to_string(v.hermiticity_residual) + ", eigenvalue range [" +
              std::to_string(v.min_eigenvalue) + ", " + std::to_string(v.max_eigenvalue) + "])");

  auto es = hermitian_eigen(k.flat);
  RealVector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    lam(i) = std::clamp(lam(i), 0.0, 1.0);
    // sqrt has unbounded slope at 0, so eigenvalues within roundoff of the
    // endpoints are snapped exactly; projections then factor exactly.
    if (lam(i) <= 1e-14) lam(i) = 0.0;
    if (lam(i) >= 1.0 - 1e-14) lam(i) = 1.0;
  }

  const Matrix& v1 = es.eigenvectors();
  Matrix k1 = v1 * lam.array().sqrt().matrix().asDiagonal() * v1.adjoint();
  Matrix k2 = v1 * (1.0 - lam.array()).sqrt().matrix().asDiagonal() * v1.adjoint();
  return SqrtFactors{Kernel{k.space, std::move(k1)}, Kernel{k.space, std::move(k2)}};
}

JsaReport check_j_self_adjoint(const Kernel& m, double tol) {
  const int n = m.d();
  const auto& part = m.space.part;
  double s11 = 0, s22 = 0, sx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const cplx her = m.flat(i, j) - std::conj(m.flat(j, i));   // 0 iff Hermitian pair
      const cplx anti = m.flat(i, j) + std::conj(m.flat(j, i));  // 0 iff anti-Hermitian pair
      const int pi = part[static_cast<std::size_t>(i)];
      const int pj = part[static_cast<std::size_t>(j)];
      if (pi == pj) {
        (pi == 1 ? s11 : s22) += std::norm(her);
      } else {
        sx += std::norm(anti);
      }
    }
  }
  JsaReport r;
  // the double loop visits each unordered pair twice
  r.res_block11 = std::sqrt(s11 / 2.0);
  r.res_block22 = std::sqrt(s22 / 2.0);
  r.res_cross = std::sqrt(sx / 2.0);
  r.max_residual = std::max({r.res_block11, r.res_block22, r.res_cross});
  r.ok = r.max_residual <= tol;
  return r;
}

JKernelBundle assemble_j_kernel(const Kernel& k, double tol) {
  JKernelBundle b;
  b.tol = tol;
  b.K = k;
  b.cert.base = validate_correlation_operator(k, tol);
  require(b.cert.base.pass, Errc::validation_failure,
          "assemble_j_kernel: correlation operator validation failed");

  auto roots = sqrt_factors(k, tol);
  b.K1 = std::move(roots.k1);
  b.K2 = std::move(roots.k2);
  b.Khat = hat_transform(k);

  const int n = k.d();
  const Matrix one = Matrix::Identity(n, n);
  b.cert.sqrt_residual_k1 = (b.K1.flat * b.K1.flat - k.flat).norm();
  b.cert.sqrt_residual_k2 = (b.K2.flat * b.K2.flat - (one - k.flat)).norm();

  // Block identities against the independent one-sided assembly: on X_i^2
  // the Khat values are sum_z K_i(x,z) K_i(z,y) sigma(z).
  const Matrix p1 = part_projection(k.space, 1);
  const Matrix p2 = part_projection(k.space, 2);
  const Matrix k1sq = b.K1.flat * b.K1.flat;
  const Matrix k2sq = b.K2.flat * b.K2.flat;
  b.cert.block11_residual = (p1 * (k1sq - b.Khat.flat) * p1).norm();
  b.cert.block22_residual = (p2 * (k2sq - b.Khat.flat) * p2).norm();
  b.cert.block21_residual = (p2 * (b.Khat.flat - k.flat) * p1).norm();
  const Matrix k21 = p2 * k.flat * p1;
  b.cert.block12_residual = (p1 * b.Khat.flat * p2 + k21.adjoint()).norm();
  b.cert.hat_involution_residual = (hat_transform(b.Khat).flat - k.flat).norm();
  b.cert.jsa = check_j_self_adjoint(b.Khat, tol);

  const double worst = std::max({b.cert.sqrt_residual_k1, b.cert.sqrt_residual_k2,
                                 b.cert.block11_residual, b.cert.block22_residual,
                                 b.cert.block21_residual, b.cert.block12_residual,
                                 b.cert.hat_involution_residual, b.cert.jsa.max_residual});
  b.cert.pass = worst <= std::max(tol, 1e-12);
  b.cert.note = "diagonal kernel values are canonical in finite dimension (atoms carry mass)";
  require(b.cert.pass, Errc::validation_failure,
          "assemble_j_kernel: block certificate failed, worst residual " + std::to_string(worst));
  return b;
}

double correlation_determinant(const Kernel& khat, const std::vector<int>& sites) {
  const int n = static_cast<int>(sites.size());
  if (n == 0) return 1.0;
  std::vector<int> sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          Errc::invalid_argument, "correlation_determinant: repeated site index");
  for (int s : sites)
    require(s >= 0 && s < khat.d(), Errc::invalid_argument, "site index out of range");

  Matrix sub(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sub(a, b) = khat.pointwise(sites[static_cast<std::size_t>(a)],
                                                           sites[static_cast<std::size_t>(b)]);
  const cplx det = sub.determinant();
  return det.real();
}

GrowthConstant growth_bound_constant(const JKernelBundle& bundle, std::uint64_t delta) {
  GrowthConstant g;
  const auto sites = mask_to_sites(delta, bundle.d());
  if (sites.empty()) {
    g.refined = 0.0;
    return g;
  }

  const int n = static_cast<int>(sites.size());
  Matrix sub(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      sub(a, b) = bundle.Khat.flat(sites[static_cast<std::size_t>(a)],
                                   sites[static_cast<std::size_t>(b)]);

  Eigen::JacobiSVD<Matrix> svd(sub);
  g.operator_norm = svd.singularValues().maxCoeff();
  g.frobenius_norm = sub.norm();

  // trace norms of the two diagonal blocks of Khat_Delta
  double tr_sum = 0;
  for (int which = 1; which <= 2; ++which) {
    std::vector<int> side;
    for (int s : sites)
      if (bundle.space().in_part(s, which)) side.push_back(s);
    if (side.empty()) continue;
    const int m = static_cast<int>(side.size());
    Matrix blk(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        blk(a, b) = bundle.Khat.flat(side[static_cast<std::size_t>(a)],
                                     side[static_cast<std::size_t>(b)]);
    Eigen::JacobiSVD<Matrix> bsvd(blk);
    tr_sum += bsvd.singularValues().sum();
  }
  g.trace_norm_sum = tr_sum;
  g.general = std::max({g.trace_norm_sum, g.frobenius_norm, g.operator_norm});

  const std::uint64_t m1 = bundle.space().mask1, m2 = bundle.space().mask2;
  const bool one_sided_1 = (delta & m2) == 0;
  const bool one_sided_2 = (delta & m1) == 0;
  if (one_sided_1 || one_sided_2) {
    const Matrix& ki = one_sided_1 ? bundle.K1.flat : bundle.K2.flat;
    double acc = 0;
    for (int s : sites) acc += ki.row(s).squaredNorm();
    g.refined = acc;
  }
  return g;
}

}  // namespace jdpp
