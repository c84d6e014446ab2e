#include "jdpp/fields.hpp"

#include <algorithm>
#include <bit>

#include "jdpp/errors.hpp"

namespace jdpp {

namespace {

inline bool occupied(std::size_t state, int k) { return (state >> k) & 1ull; }

inline double jw_sign(std::size_t state, int k) {
  const std::uint64_t below = state & ((1ull << k) - 1ull);
  return (std::popcount(below) & 1) ? -1.0 : 1.0;
}

/// Single-mode action |s> -> sign |t>, false when annihilated.
inline bool mode_apply(std::size_t s, int mode, bool dagger, std::size_t& t, double& sign) {
  const std::uint64_t bit = 1ull << mode;
  if (dagger) {
    if (s & bit) return false;
    t = s | bit;
  } else {
    if (!(s & bit)) return false;
    t = s & ~bit;
  }
  sign = jw_sign(s, mode);
  return true;
}

Vector embed_copy(const Vector& phi, int copy, int d) {
  Vector g = Vector::Zero(2 * d);
  g.segment(copy == 1 ? 0 : d, d) = phi;
  return g;
}

void check_phi(const JKernelBundle& bundle, const Vector& phi) {
  require(phi.size() == bundle.d(), Errc::dimension_mismatch,
          "field argument must have length d");
}

void check_space(const JKernelBundle& bundle, const FockSpace& fs) {
  require(fs.sites == bundle.d(), Errc::dimension_mismatch,
          "Fock space does not match the bundle dimension");
}

Matrix signed_subset_projection(const SpacePartition& space, std::uint64_t delta) {
  // J_Delta = P_{Delta cap X1} - P_{Delta cap X2}
  Matrix j = Matrix::Zero(space.d, space.d);
  for (int i = 0; i < space.d; ++i)
    if ((delta >> i) & 1ull) j(i, i) = space.in_part(i, 1) ? 1.0 : -1.0;
  return j;
}

void check_delta(const JKernelBundle& bundle, std::uint64_t delta) {
  require((delta & ~bundle.space().full_mask()) == 0, Errc::invalid_argument,
          "subset mask references sites outside the space");
}

// One series/sandwich group: sum_{i,j} coeff(i,j) L_{lbase+i} R R_{rbase+j}.
struct Group {
  Matrix coeff;  // d x d
  int lbase;
  bool ldag;
  int rbase;
  bool rdag;
};

/// The eight groups of the rho series; the X2 groups carry transposed
/// coefficients because the basis expansion pairs (e_i, e_j) the other way
/// around there.
std::vector<Group> series_groups(const JKernelBundle& bundle, std::uint64_t delta) {
  const int d = bundle.d();
  const auto& space = bundle.space();
  std::vector<Group> out;
  const std::uint64_t d1 = delta & space.mask1;
  const std::uint64_t d2 = delta & space.mask2;
  if (d1) {
    const Matrix p = subset_projection(space, d1);
    const Matrix& k1 = bundle.K1.flat;
    const Matrix& k2 = bundle.K2.flat;
    out.push_back({k2 * p * k1, d, true, 0, true});
    out.push_back({k1 * p * k2, 0, false, d, false});
    out.push_back({k2 * p * k2, d, true, d, false});
    out.push_back({k1 * p * k1, 0, false, 0, true});
  }
  if (d2) {
    const Matrix p = subset_projection(space, d2);
    const Matrix& k1 = bundle.K1.flat;
    const Matrix& k2 = bundle.K2.flat;
    out.push_back({(k2 * p * k1).transpose(), 0, true, d, true});
    out.push_back({(k1 * p * k2).transpose(), d, false, 0, false});
    out.push_back({(k1 * p * k1).transpose(), 0, true, 0, false});
    out.push_back({(k2 * p * k2).transpose(), d, false, d, true});
  }
  return out;
}

}  // namespace

void FieldOp::apply_accumulate(const FockSpace& fs, const FockVector& in, FockVector& out) const {
  apply_creation(fs, u, in, out);
  apply_annihilation(fs, v, in, out);
}

FockVector FieldOp::apply(const FockSpace& fs, const FockVector& in) const {
  FockVector out = FockVector::Zero(in.size());
  apply_accumulate(fs, in, out);
  return out;
}

FockOperator FieldOp::to_operator(const FockSpace& fs) const {
  return creation(fs, u) + annihilation(fs, v);
}

FieldPair gauge_fields(const JKernelBundle& bundle, const Vector& phi, const FockSpace& fs) {
  check_phi(bundle, phi);
  check_space(bundle, fs);
  const int d = bundle.d();
  FieldOp plus{embed_copy(bundle.K2.flat * phi, 2, d),
               embed_copy((bundle.K1.flat * phi).conjugate(), 1, d)};
  return FieldPair{plus, plus.adjoint()};
}

FieldPair bogoliubov_fields(const JKernelBundle& bundle, const Vector& phi, const FockSpace& fs) {
  check_phi(bundle, phi);
  check_space(bundle, fs);
  const auto& part = bundle.space().part;
  Vector p1phi = phi, p2cphi = phi.conjugate();
  for (int i = 0; i < bundle.d(); ++i) {
    if (part[static_cast<std::size_t>(i)] == 2)
      p1phi(i) = 0.0;
    else
      p2cphi(i) = 0.0;
  }
  const FieldPair g1 = gauge_fields(bundle, p1phi, fs);
  const FieldPair g2 = gauge_fields(bundle, p2cphi, fs);
  FieldOp plus = g1.plus + g2.minus;
  return FieldPair{plus, plus.adjoint()};
}

FockOperator rho_delta(const JKernelBundle& bundle, std::uint64_t delta, const FockSpace& fs,
                       RhoForm form) {
  check_space(bundle, fs);
  check_delta(bundle, delta);
  const int d = bundle.d();

  if (form == RhoForm::series) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(fs.dim), static_cast<Eigen::Index>(fs.dim));
    for (const Group& g : series_groups(bundle, delta)) {
      for (std::size_t s = 0; s < fs.dim; ++s) {
        for (int j = 0; j < d; ++j) {
          std::size_t t1;
          double sign1;
          if (!mode_apply(s, g.rbase + j, g.rdag, t1, sign1)) continue;
          for (int i = 0; i < d; ++i) {
            const cplx c = g.coeff(i, j);
            if (c == 0.0) continue;
            std::size_t t2;
            double sign2;
            if (!mode_apply(t1, g.lbase + i, g.ldag, t2, sign2)) continue;
            m(static_cast<Eigen::Index>(t2), static_cast<Eigen::Index>(s)) += c * sign1 * sign2;
          }
        }
      }
    }
    FockOperator out = FockOperator::from_matrix(std::move(m));
    out.hermitian = true;
    return out;
  }

  const Matrix jd = signed_subset_projection(bundle.space(), delta);
  const Matrix pair_coeff_h = bundle.K2.flat * jd * bundle.K1.flat;  // d x d
  Matrix c = Matrix::Zero(2 * d, 2 * d);
  c.block(d, 0, d, d) = pair_coeff_h;  // (.)_{2,1}: copy-2 index (x) copy-1 index

  Matrix b = Matrix::Zero(2 * d, 2 * d);
  b.topLeftCorner(d, d) = -(bundle.K1.flat * jd * bundle.K1.flat).conjugate();
  b.bottomRightCorner(d, d) = bundle.K2.flat * jd * bundle.K2.flat;

  cplx tr = 0.0;
  for (int i = 0; i < d; ++i)
    if ((delta >> i) & 1ull) tr += bundle.Khat.flat(i, i);

  FockOperator pc = pair_creation(fs, c);
  const FockOperator op = pc + pc.adjoint() + second_quantization(fs, b);
  FockOperator out = FockOperator::from_matrix(op.matrix_part(), op.identity_part() + tr);
  out.hermitian = true;
  return out;
}

FockVector rho_apply(const JKernelBundle& bundle, std::uint64_t delta, const FockSpace& fs,
                     const FockVector& in) {
  check_space(bundle, fs);
  check_delta(bundle, delta);
  const int d = bundle.d();
  const Matrix jd = signed_subset_projection(bundle.space(), delta);
  Matrix c = Matrix::Zero(2 * d, 2 * d);
  c.block(d, 0, d, d) = bundle.K2.flat * jd * bundle.K1.flat;
  Matrix b = Matrix::Zero(2 * d, 2 * d);
  b.topLeftCorner(d, d) = -(bundle.K1.flat * jd * bundle.K1.flat).conjugate();
  b.bottomRightCorner(d, d) = bundle.K2.flat * jd * bundle.K2.flat;
  cplx tr = 0.0;
  for (int i = 0; i < d; ++i)
    if ((delta >> i) & 1ull) tr += bundle.Khat.flat(i, i);

  FockVector out = tr * in;
  apply_pair_creation(fs, c, in, out);
  apply_pair_annihilation(fs, c, in, out);
  apply_second_quantization(fs, b, in, out);
  return out;
}

FockOperator w_op(const JKernelBundle& bundle, std::uint64_t delta, const FockOperator& r,
                  const FockSpace& fs) {
  check_space(bundle, fs);
  check_delta(bundle, delta);
  require(r.dim() == fs.dim, Errc::dimension_mismatch, "W(Delta, R): R has the wrong dimension");
  const int d = bundle.d();
  const Eigen::Index n = static_cast<Eigen::Index>(fs.dim);
  const Matrix& rm = r.matrix_part();

  Matrix acc = Matrix::Zero(n, n);
  Matrix tcol(n, n);
  for (const Group& g : series_groups(bundle, delta)) {
    for (int i = 0; i < d; ++i) {
      if (g.coeff.row(i).isZero(0.0)) continue;
      // tcol = rm * sum_j coeff(i,j) a^{rdag}_{rbase+j}, built column by column
      tcol.setZero();
      for (std::size_t s = 0; s < fs.dim; ++s) {
        for (int j = 0; j < d; ++j) {
          const cplx cj = g.coeff(i, j);
          if (cj == 0.0) continue;
          std::size_t t1;
          double sign1;
          if (!mode_apply(s, g.rbase + j, g.rdag, t1, sign1)) continue;
          tcol.col(static_cast<Eigen::Index>(s)) += cj * sign1 * rm.col(static_cast<Eigen::Index>(t1));
        }
      }
      // left-multiply the single mode L_{lbase+i} (signed row gather)
      for (std::size_t s = 0; s < fs.dim; ++s) {
        std::size_t t2;
        double sign2;
        if (!mode_apply(s, g.lbase + i, g.ldag, t2, sign2)) continue;
        acc.row(static_cast<Eigen::Index>(t2)) += sign2 * tcol.row(static_cast<Eigen::Index>(s));
      }
    }
  }

  FockOperator out = FockOperator::from_matrix(std::move(acc));
  if (r.identity_part() != 0.0)
    out += rho_delta(bundle, delta, fs, RhoForm::series) * r.identity_part();
  return out;
}

namespace {

FockOperator wick_recurrence(const JKernelBundle& bundle, const FockSpace& fs,
                             const std::vector<std::uint64_t>& deltas,
                             std::map<std::uint64_t, FockOperator>& rho_cache,
                             std::map<std::vector<std::uint64_t>, FockOperator>& memo) {
  if (auto it = memo.find(deltas); it != memo.end()) return it->second;

  auto rho_of = [&](std::uint64_t m) -> const FockOperator& {
    auto it = rho_cache.find(m);
    if (it == rho_cache.end())
      it = rho_cache.emplace(m, rho_delta(bundle, m, fs, RhoForm::definition)).first;
    return it->second;
  };

  FockOperator result;
  if (deltas.size() == 1) {
    result = rho_of(deltas[0]);
  } else {
    std::vector<std::uint64_t> head(deltas.begin(), deltas.end() - 1);
    const std::uint64_t last = deltas.back();
    result = rho_of(last) * wick_recurrence(bundle, fs, head, rho_cache, memo);
    for (std::size_t i = 0; i < head.size(); ++i) {
      std::vector<std::uint64_t> sub = head;
      sub[i] = head[i] & last;
      result -= wick_recurrence(bundle, fs, sub, rho_cache, memo);
    }
  }
  memo.emplace(deltas, result);
  return result;
}

}  // namespace

FockOperator wick_product(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas,
                          const FockSpace& fs, WickRoute route) {
  check_space(bundle, fs);
  require(!deltas.empty(), Errc::invalid_argument, "Wick product needs at least one subset");
  for (std::uint64_t m : deltas) check_delta(bundle, m);

  std::vector<std::uint64_t> ds(deltas.begin(), deltas.end());
  FockOperator out;
  if (route == WickRoute::recurrence) {
    std::map<std::uint64_t, FockOperator> rho_cache;
    std::map<std::vector<std::uint64_t>, FockOperator> memo;
    out = wick_recurrence(bundle, fs, ds, rho_cache, memo);
  } else {
    out = rho_delta(bundle, ds[0], fs, RhoForm::definition);
    for (std::size_t i = 1; i < ds.size(); ++i) out = w_op(bundle, ds[i], out, fs);
  }
  out.hermitian = true;  // Wick products of the commuting Hermitian family
  return out;
}

WickEngine::WickEngine(const JKernelBundle& bundle, const FockSpace& fs)
    : bundle_(&bundle), fs_(&fs) {
  check_space(bundle, fs);
}

const FockOperator& WickEngine::rho(std::uint64_t delta) {
  auto it = rho_cache_.find(delta);
  if (it == rho_cache_.end())
    it = rho_cache_.emplace(delta, rho_delta(*bundle_, delta, *fs_, RhoForm::definition)).first;
  return it->second;
}

const FockOperator& WickEngine::wick(const std::vector<std::uint64_t>& deltas) {
  require(!deltas.empty(), Errc::invalid_argument, "Wick product needs at least one subset");
  std::vector<std::uint64_t> key = deltas;
  std::sort(key.begin(), key.end());
  auto it = wick_cache_.find(key);
  if (it == wick_cache_.end()) {
    std::map<std::vector<std::uint64_t>, FockOperator> memo;
    FockOperator value = wick_recurrence(*bundle_, *fs_, key, rho_cache_, memo);
    value.hermitian = true;
    it = wick_cache_.emplace(key, std::move(value)).first;
  }
  return it->second;
}

cplx WickEngine::plain_moment(const std::vector<std::uint64_t>& deltas) {
  FockVector v = vacuum(*fs_);
  for (auto it = deltas.rbegin(); it != deltas.rend(); ++it) v = rho(*it).apply(v);
  return v(0);
}

}  // namespace jdpp
