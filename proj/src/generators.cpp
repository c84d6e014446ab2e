#include "jdpp/generators.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "jdpp/errors.hpp"
#include "jdpp/rng.hpp"

namespace jdpp {

namespace {

Matrix random_complex(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  return g;
}

Kernel clip_to_valid(const SpacePartition& space, const Matrix& flat) {
  Matrix h = 0.5 * (flat + flat.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) lam(i) = std::clamp(lam(i), 0.0, 1.0);
  Matrix out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  return make_kernel_flat(space, std::move(out));
}

}  // namespace

Kernel random_valid_kernel(const SpacePartition& space, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g = random_complex(space.d, space.d, rng);
  Matrix h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) lam(i) = 1.0 / (1.0 + std::exp(-lam(i)));
  Matrix out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  return make_kernel_flat(space, std::move(out));
}

Kernel projection_kernel(const SpacePartition& space, int rank, std::uint64_t seed) {
  require(rank >= 0 && rank <= space.d, Errc::invalid_argument,
          "projection rank must lie in [0, d]");
  if (rank == 0) return make_kernel_flat(space, Matrix::Zero(space.d, space.d));
  Rng rng(seed);
  Matrix g = random_complex(space.d, rank, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(space.d, rank);
  return make_kernel_flat(space, q * q.adjoint());
}

Kernel discrete_sine_kernel(const SpacePartition& space, double a) {
  require(a >= 0.0 && a <= 1.0, Errc::invalid_argument, "sine kernel density must be in [0,1]");
  const int d = space.d;
  Matrix values(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) {
        values(i, j) = a;
      } else {
        const double t = M_PI * static_cast<double>(i - j);
        values(i, j) = std::sin(a * t) / t;
      }
    }
  }
  const Kernel raw = make_kernel_pointwise(space, values);
  return clip_to_valid(space, raw.flat);
}

}  // namespace jdpp
