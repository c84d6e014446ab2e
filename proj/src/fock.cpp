#include "jdpp/fock.hpp"

#include <bit>
#include <cmath>

#include "jdpp/errors.hpp"
#include "jdpp/rng.hpp"

namespace jdpp {

namespace {

/// (-1)^{occupied modes below k} of the JW string.
inline double jw_sign(std::size_t state, int k) {
  const std::uint64_t below = state & ((1ull << k) - 1ull);
  return (std::popcount(below) & 1) ? -1.0 : 1.0;
}

inline bool occupied(std::size_t state, int k) { return (state >> k) & 1ull; }

void check_fs_vector(const FockSpace& fs, const FockVector& v) {
  require(static_cast<std::size_t>(v.size()) == fs.dim, Errc::dimension_mismatch,
          "Fock vector does not match space dimension");
}

void check_mode_vector(const FockSpace& fs, const Vector& g) {
  require(g.size() == fs.modes, Errc::dimension_mismatch,
          "mode vector must have length 2d");
}

void check_mode_matrix(const FockSpace& fs, const Matrix& m) {
  require(m.rows() == fs.modes && m.cols() == fs.modes, Errc::dimension_mismatch,
          "mode matrix must be 2d x 2d");
}

void require_dense(const FockSpace& fs) {
  require(fs.dense_ok(), Errc::infeasible_size,
          "dense Fock operators are capped at 2d <= " + std::to_string(FockSpace::kDenseModeCap) +
              " modes; use the matrix-free appliers");
}

template <typename Applier>
FockOperator densify(const FockSpace& fs, Applier&& apply_one) {
  require_dense(fs);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(fs.dim), static_cast<Eigen::Index>(fs.dim));
  for (std::size_t s = 0; s < fs.dim; ++s) apply_one(s, m);
  return FockOperator::from_matrix(std::move(m));
}

}  // namespace

FockSpace::FockSpace(int d) {
  require(d >= 1, Errc::invalid_argument, "Fock space needs at least one site");
  require(d <= 30, Errc::infeasible_size, "Fock space dimension overflows");
  sites = d;
  modes = 2 * d;
  dim = 1ull << modes;
}

FockVector vacuum(const FockSpace& fs) {
  FockVector v = FockVector::Zero(static_cast<Eigen::Index>(fs.dim));
  v(0) = 1.0;
  return v;
}

FockOperator FockOperator::zero(const FockSpace& fs) {
  require_dense(fs);
  return from_matrix(
      Matrix::Zero(static_cast<Eigen::Index>(fs.dim), static_cast<Eigen::Index>(fs.dim)));
}

FockOperator FockOperator::scalar(const FockSpace& fs, cplx c) {
  require_dense(fs);
  FockOperator op = zero(fs);
  op.id_ = c;
  return op;
}

FockOperator FockOperator::from_matrix(Matrix m, cplx id) {
  require(m.rows() == m.cols(), Errc::dimension_mismatch, "Fock operator matrix must be square");
  FockOperator op;
  op.mat_ = std::move(m);
  op.id_ = id;
  return op;
}

Matrix FockOperator::materialized() const {
  Matrix out = mat_;
  out.diagonal().array() += id_;
  return out;
}

FockVector FockOperator::apply(const FockVector& v) const {
  require(v.size() == mat_.rows(), Errc::dimension_mismatch, "vector/operator size mismatch");
  return mat_ * v + id_ * v;
}

FockOperator FockOperator::adjoint() const {
  FockOperator out = from_matrix(mat_.adjoint(), std::conj(id_));
  out.hermitian = hermitian;
  return out;
}

FockOperator FockOperator::operator+(const FockOperator& o) const {
  require(dim() == o.dim(), Errc::dimension_mismatch, "operator size mismatch");
  FockOperator out = from_matrix(mat_ + o.mat_, id_ + o.id_);
  if (hermitian == true && o.hermitian == true) out.hermitian = true;
  return out;
}

FockOperator FockOperator::operator-(const FockOperator& o) const {
  require(dim() == o.dim(), Errc::dimension_mismatch, "operator size mismatch");
  FockOperator out = from_matrix(mat_ - o.mat_, id_ - o.id_);
  if (hermitian == true && o.hermitian == true) out.hermitian = true;
  return out;
}

FockOperator FockOperator::operator*(const FockOperator& o) const {
  require(dim() == o.dim(), Errc::dimension_mismatch, "operator size mismatch");
  Matrix m = mat_ * o.mat_;
  if (o.id_ != 0.0) m += o.id_ * mat_;
  if (id_ != 0.0) m += id_ * o.mat_;
  return from_matrix(std::move(m), id_ * o.id_);
}

FockOperator FockOperator::operator*(cplx c) const { return from_matrix(c * mat_, c * id_); }

FockOperator& FockOperator::operator+=(const FockOperator& o) {
  require(dim() == o.dim(), Errc::dimension_mismatch, "operator size mismatch");
  mat_ += o.mat_;
  id_ += o.id_;
  return *this;
}

FockOperator& FockOperator::operator-=(const FockOperator& o) {
  require(dim() == o.dim(), Errc::dimension_mismatch, "operator size mismatch");
  mat_ -= o.mat_;
  id_ -= o.id_;
  return *this;
}

double FockOperator::frobenius_norm() const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < mat_.cols(); ++j) {
    for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
      const cplx v = i == j ? mat_(i, j) + id_ : mat_(i, j);
      acc += std::norm(v);
    }
  }
  return std::sqrt(acc);
}

void apply_creation(const FockSpace& fs, const Vector& g, const FockVector& in, FockVector& out) {
  check_mode_vector(fs, g);
  check_fs_vector(fs, in);
  check_fs_vector(fs, out);
  for (int k = 0; k < fs.modes; ++k) {
    const cplx gk = g(k);
    if (gk == 0.0) continue;
    const std::uint64_t bit = 1ull << k;
    for (std::size_t s = 0; s < fs.dim; ++s) {
      if (in(static_cast<Eigen::Index>(s)) == 0.0 || (s & bit)) continue;
      out(static_cast<Eigen::Index>(s | bit)) +=
          gk * jw_sign(s, k) * in(static_cast<Eigen::Index>(s));
    }
  }
}

void apply_annihilation(const FockSpace& fs, const Vector& g, const FockVector& in,
                        FockVector& out) {
  check_mode_vector(fs, g);
  check_fs_vector(fs, in);
  check_fs_vector(fs, out);
  for (int k = 0; k < fs.modes; ++k) {
    const cplx gk = std::conj(g(k));
    if (gk == 0.0) continue;
    const std::uint64_t bit = 1ull << k;
    for (std::size_t s = 0; s < fs.dim; ++s) {
      if (in(static_cast<Eigen::Index>(s)) == 0.0 || !(s & bit)) continue;
      out(static_cast<Eigen::Index>(s & ~bit)) +=
          gk * jw_sign(s, k) * in(static_cast<Eigen::Index>(s));
    }
  }
}

void apply_pair_creation(const FockSpace& fs, const Matrix& c, const FockVector& in,
                         FockVector& out) {
  check_mode_matrix(fs, c);
  check_fs_vector(fs, in);
  check_fs_vector(fs, out);
  for (std::size_t s = 0; s < fs.dim; ++s) {
    const cplx amp = in(static_cast<Eigen::Index>(s));
    if (amp == 0.0) continue;
    for (int l = 0; l < fs.modes; ++l) {
      if (occupied(s, l)) continue;
      const std::size_t t = s | (1ull << l);
      const double sl = jw_sign(s, l);
      for (int k = 0; k < fs.modes; ++k) {
        const cplx ckl = c(k, l);
        if (ckl == 0.0 || occupied(t, k)) continue;
        out(static_cast<Eigen::Index>(t | (1ull << k))) += ckl * sl * jw_sign(t, k) * amp;
      }
    }
  }
}

void apply_pair_annihilation(const FockSpace& fs, const Matrix& c, const FockVector& in,
                             FockVector& out) {
  check_mode_matrix(fs, c);
  check_fs_vector(fs, in);
  check_fs_vector(fs, out);
  // (sum c_kl a+_k a+_l)^* = sum conj(c_kl) a-_l a-_k
  for (std::size_t s = 0; s < fs.dim; ++s) {
    const cplx amp = in(static_cast<Eigen::Index>(s));
    if (amp == 0.0) continue;
    for (int k = 0; k < fs.modes; ++k) {
      if (!occupied(s, k)) continue;
      const std::size_t t = s & ~(1ull << k);
      const double sk = jw_sign(s, k);
      for (int l = 0; l < fs.modes; ++l) {
        const cplx ckl = std::conj(c(k, l));
        if (ckl == 0.0 || !occupied(t, l)) continue;
        out(static_cast<Eigen::Index>(t & ~(1ull << l))) += ckl * sk * jw_sign(t, l) * amp;
      }
    }
  }
}

void apply_second_quantization(const FockSpace& fs, const Matrix& b, const FockVector& in,
                               FockVector& out) {
  check_mode_matrix(fs, b);
  check_fs_vector(fs, in);
  check_fs_vector(fs, out);
  for (std::size_t s = 0; s < fs.dim; ++s) {
    const cplx amp = in(static_cast<Eigen::Index>(s));
    if (amp == 0.0) continue;
    for (int l = 0; l < fs.modes; ++l) {
      if (!occupied(s, l)) continue;
      const std::size_t t = s & ~(1ull << l);
      const double sl = jw_sign(s, l);
      for (int k = 0; k < fs.modes; ++k) {
        const cplx bkl = b(k, l);
        if (bkl == 0.0 || occupied(t, k)) continue;
        out(static_cast<Eigen::Index>(t | (1ull << k))) += bkl * sl * jw_sign(t, k) * amp;
      }
    }
  }
}

FockOperator creation(const FockSpace& fs, const Vector& g) {
  check_mode_vector(fs, g);
  return densify(fs, [&](std::size_t s, Matrix& m) {
    for (int k = 0; k < fs.modes; ++k) {
      if (g(k) == 0.0 || occupied(s, k)) continue;
      m(static_cast<Eigen::Index>(s | (1ull << k)), static_cast<Eigen::Index>(s)) +=
          g(k) * jw_sign(s, k);
    }
  });
}

FockOperator annihilation(const FockSpace& fs, const Vector& g) {
  return creation(fs, g).adjoint();
}

FockOperator pair_creation(const FockSpace& fs, const Matrix& c) {
  check_mode_matrix(fs, c);
  return densify(fs, [&](std::size_t s, Matrix& m) {
    for (int l = 0; l < fs.modes; ++l) {
      if (occupied(s, l)) continue;
      const std::size_t t = s | (1ull << l);
      const double sl = jw_sign(s, l);
      for (int k = 0; k < fs.modes; ++k) {
        if (c(k, l) == 0.0 || occupied(t, k)) continue;
        m(static_cast<Eigen::Index>(t | (1ull << k)), static_cast<Eigen::Index>(s)) +=
            c(k, l) * sl * jw_sign(t, k);
      }
    }
  });
}

FockOperator second_quantization(const FockSpace& fs, const Matrix& b) {
  check_mode_matrix(fs, b);
  return densify(fs, [&](std::size_t s, Matrix& m) {
    for (int l = 0; l < fs.modes; ++l) {
      if (!occupied(s, l)) continue;
      const std::size_t t = s & ~(1ull << l);
      const double sl = jw_sign(s, l);
      for (int k = 0; k < fs.modes; ++k) {
        if (b(k, l) == 0.0 || occupied(t, k)) continue;
        m(static_cast<Eigen::Index>(t | (1ull << k)), static_cast<Eigen::Index>(s)) +=
            b(k, l) * sl * jw_sign(t, k);
      }
    }
  });
}

cplx vacuum_expectation(const FockOperator& op) {
  const cplx value = op.vacuum_expectation();
  if (op.hermitian == true)
    require(std::abs(value.imag()) < 1e-12, Errc::validation_failure,
            "vacuum expectation of a Hermitian operator has imaginary residue " +
                std::to_string(value.imag()));
  return value;
}

double power_iteration_norm(std::size_t dim,
                            const std::function<FockVector(const FockVector&)>& apply,
                            const std::function<FockVector(const FockVector&)>& apply_adjoint,
                            Rng& rng, int iterations) {
  FockVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(rng.normal(), rng.normal());
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    FockVector w = apply_adjoint(apply(v));
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    est = std::sqrt(n);
  }
  return est;
}

}  // namespace jdpp
