#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jdpp/errors.hpp"
#include "jdpp/fields.hpp"
#include "jdpp/generators.hpp"
#include "jdpp/rng.hpp"
#include "support.hpp"

using namespace jdpp;
using test::op_distance;
using test::random_cvec;

namespace {

JKernelBundle bundle_from(const SpacePartition& s, const Matrix& k) {
  return assemble_j_kernel(make_kernel_flat(s, Matrix(k)));
}

Vector embed(const Vector& phi, int copy, int d) {
  Vector g = Vector::Zero(2 * d);
  g.segment(copy == 1 ? 0 : d, d) = phi;
  return g;
}

}  // namespace

TEST_CASE("gauge fields at the extreme kernels") {
  const SpacePartition s = uniform_space(2, {1, 2});
  const FockSpace fs(2);
  Rng rng(100);
  const Vector phi = random_cvec(rng, 2);

  {
    // K = 0: calA+(phi) = a+_2(phi), two-point function vanishes
    const JKernelBundle b = bundle_from(s, Matrix::Zero(2, 2));
    const FieldPair f = gauge_fields(b, phi, fs);
    CHECK(op_distance(f.plus.to_operator(fs), creation(fs, embed(phi, 2, 2))) < 1e-13);
    const Vector psi = random_cvec(rng, 2);
    const FieldPair fp = gauge_fields(b, psi, fs);
    CHECK(std::abs((f.plus.to_operator(fs) * fp.minus.to_operator(fs)).vacuum_expectation()) <
          1e-14);
  }
  {
    // K = 1: calA+(phi) = a-_1(conj phi), two-point function (phi, psi)
    const JKernelBundle b = bundle_from(s, Matrix::Identity(2, 2));
    const FieldPair f = gauge_fields(b, phi, fs);
    CHECK(op_distance(f.plus.to_operator(fs), annihilation(fs, embed(phi.conjugate(), 1, 2))) <
          1e-13);
    const Vector psi = random_cvec(rng, 2);
    const FieldPair fp = gauge_fields(b, psi, fs);
    CHECK(std::abs((f.plus.to_operator(fs) * fp.minus.to_operator(fs)).vacuum_expectation() -
                   inner(phi, psi)) < 1e-13);
  }
  {
    // d=1, K=[p]: tau(calA+(e1) calA-(e1)) = p
    const double p = 0.37;
    const SpacePartition s1 = uniform_space(1, {1});
    const JKernelBundle b = bundle_from(s1, Matrix::Constant(1, 1, p));
    const FockSpace f1(1);
    const FieldPair f = gauge_fields(b, Vector::Ones(1), f1);
    CHECK(std::abs((f.plus.to_operator(f1) * f.minus.to_operator(f1)).vacuum_expectation() -
                   cplx(p)) < 1e-14);
  }
}

TEST_CASE("gauge-invariant determinant formula up to three pairs") {
  const SpacePartition s = uniform_space(3, {1, 2, 2});
  Rng rng(110);
  const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s, rng.next()));
  const FockSpace fs(3);

  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<Vector> phis, psis;
      for (int i = 0; i < m; ++i) phis.push_back(random_cvec(rng, 3));
      for (int j = 0; j < n; ++j) psis.push_back(random_cvec(rng, 3));

      // tau(calA+(phi_m) ... calA+(phi_1) calA-(psi_1) ... calA-(psi_n))
      FockVector v = vacuum(fs);
      for (int j = n; j-- > 0;) v = gauge_fields(b, psis[static_cast<std::size_t>(j)], fs).minus.apply(fs, v);
      for (int i = 0; i < m; ++i) v = gauge_fields(b, phis[static_cast<std::size_t>(i)], fs).plus.apply(fs, v);
      const cplx got = v(0);

      if (m != n) {
        CHECK(std::abs(got) < 1e-10);
      } else {
        Matrix gram(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            gram(i, j) = inner(b.K.flat * phis[static_cast<std::size_t>(i)],
                               psis[static_cast<std::size_t>(j)]);
        CHECK(std::abs(got - gram.determinant()) < 1e-10);
      }
    }
  }
}

TEST_CASE("Bogoliubov fields: defining relation, one-sided reductions, CAR") {
  const SpacePartition s = uniform_space(3, {1, 2, 2});
  Rng rng(120);
  const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s, rng.next()));
  const FockSpace fs(3);

  // phi supported in X1: A = calA exactly
  Vector phi1 = Vector::Zero(3);
  phi1(0) = cplx(0.3, -0.8);
  CHECK(op_distance(bogoliubov_fields(b, phi1, fs).plus.to_operator(fs),
                    gauge_fields(b, phi1, fs).plus.to_operator(fs)) < 1e-14);

  // phi real, supported in X2: A+ = calA-
  Vector phi2 = Vector::Zero(3);
  phi2(1) = 0.7;
  phi2(2) = -0.2;
  CHECK(op_distance(bogoliubov_fields(b, phi2, fs).plus.to_operator(fs),
                    gauge_fields(b, phi2, fs).minus.to_operator(fs)) < 1e-14);

  for (int trial = 0; trial < 30; ++trial) {
    const Vector phi = random_cvec(rng, 3), psi = random_cvec(rng, 3);
    const FieldPair a = bogoliubov_fields(b, phi, fs);
    const FieldPair c = bogoliubov_fields(b, psi, fs);

    // defining relation A+(phi) = calA+(P1 phi) + calA-(P2 C phi)
    Vector p1phi = phi, p2cphi = phi.conjugate();
    p1phi(1) = p1phi(2) = 0.0;
    p2cphi(0) = 0.0;
    const FockOperator expect = gauge_fields(b, p1phi, fs).plus.to_operator(fs) +
                                gauge_fields(b, p2cphi, fs).minus.to_operator(fs);
    CHECK(op_distance(a.plus.to_operator(fs), expect) < 1e-12);

    // the explicit expansion, with the conjugation applied before K2 on X2
    const Matrix p1 = part_projection(s, 1), p2 = part_projection(s, 2);
    const Vector gplus_1 = (b.K1.flat * (p2 * phi).conjugate()).conjugate();
    const Vector gplus_2 = b.K2.flat * (p1 * phi);
    const Vector gminus_1 = (b.K1.flat * (p1 * phi)).conjugate();
    const Vector gminus_2 = b.K2.flat * (p2 * phi).conjugate();
    const FockOperator explicit_form =
        creation(fs, embed(gplus_1, 1, 3) + embed(gplus_2, 2, 3)) +
        annihilation(fs, embed(gminus_1, 1, 3) + embed(gminus_2, 2, 3));
    CHECK(op_distance(a.plus.to_operator(fs), explicit_form) < 1e-12);

    // CAR
    CHECK(test::anticommutator(fs, a.plus, c.plus).frobenius_norm() < 1e-12);
    CHECK(test::anticommutator(fs, a.minus, c.minus).frobenius_norm() < 1e-12);
    CHECK(op_distance(test::anticommutator(fs, a.minus, c.plus),
                      FockOperator::scalar(fs, inner(psi, phi))) < 1e-12);
  }
}

TEST_CASE("rho(Delta): pinned d=1 anchors and algebraic properties") {
  {
    const double p = 0.25;
    const SpacePartition s1 = uniform_space(1, {1});
    const JKernelBundle b = bundle_from(s1, Matrix::Constant(1, 1, p));
    const FockSpace fs(1);
    const Matrix m = rho_delta(b, 1, fs, RhoForm::definition).materialized();
    const double c = std::sqrt(p * (1 - p));
    CHECK(std::abs(m(0, 0) - cplx(p)) < 1e-15);
    CHECK(std::abs(m(1, 1)) < 1e-15);
    CHECK(std::abs(m(2, 2) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(m(3, 3) - cplx(0.75)) < 1e-15);
    CHECK(std::abs(m(3, 0) + cplx(c)) < 1e-15);
    CHECK(std::abs(m(0, 3) + cplx(c)) < 1e-15);
  }

  const SpacePartition s = uniform_space(3, {1, 2, 1});
  Rng rng(130);
  const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s, rng.next()));
  const FockSpace fs(3);
  WickEngine engine(b, fs);

  CHECK(rho_delta(b, 0, fs).frobenius_norm() == 0.0);
  CHECK_THROWS_AS(rho_delta(b, 0b1000, fs), Error);

  for (std::uint64_t m = 0; m < 8; ++m) {
    const FockOperator& rho = engine.rho(m);
    CHECK((rho - rho.adjoint()).frobenius_norm() < 1e-11);
    CHECK(op_distance(rho, rho_delta(b, m, fs, RhoForm::series)) < 1e-11);
    // tau(rho) = sum of Khat diagonal over Delta
    cplx tr = 0;
    for (int i = 0; i < 3; ++i)
      if ((m >> i) & 1) tr += b.Khat.flat(i, i);
    CHECK(std::abs(rho.vacuum_expectation() - tr) < 1e-12);
  }
  // additivity and commutativity
  CHECK(op_distance(engine.rho(0b101), engine.rho(0b100) + engine.rho(0b001)) < 1e-12);
  for (std::uint64_t a = 0; a < 8; ++a)
    for (std::uint64_t c = a + 1; c < 8; ++c) {
      const FockOperator comm = engine.rho(a) * engine.rho(c) - engine.rho(c) * engine.rho(a);
      CHECK(comm.frobenius_norm() < 1e-10);
    }
}

TEST_CASE("rho matrix-free application matches the dense operator") {
  const SpacePartition s = uniform_space(3, {1, 2, 2});
  Rng rng(140);
  const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s, rng.next()));
  const FockSpace fs(3);
  for (std::uint64_t m = 0; m < 8; ++m) {
    FockVector v(static_cast<Eigen::Index>(fs.dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(rng.normal(), rng.normal());
    CHECK((rho_apply(b, m, fs, v) - rho_delta(b, m, fs).apply(v)).norm() < 1e-12);
  }
}

TEST_CASE("rho on a space beyond the dense cap, through the lazy path") {
  const SpacePartition s = uniform_space(6, {1, 1, 1, 2, 2, 2});
  Rng rng(150);
  const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s, rng.next()));
  const FockSpace fs(6);
  CHECK_FALSE(fs.dense_ok());
  CHECK_THROWS_AS(rho_delta(b, 1, fs), Error);

  FockVector v(static_cast<Eigen::Index>(fs.dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(rng.normal(), rng.normal());
  v.normalize();
  FockVector w(static_cast<Eigen::Index>(fs.dim));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = cplx(rng.normal(), rng.normal());
  w.normalize();

  // additivity and Hermiticity hold vector-wise
  const std::uint64_t d1 = 0b010110, d2 = 0b101001;
  const FockVector lhs = rho_apply(b, d1 | d2, fs, v);
  const FockVector rhs = rho_apply(b, d1, fs, v) + rho_apply(b, d2, fs, v);
  CHECK((lhs - rhs).norm() < 1e-12);
  const cplx br1 = inner(rho_apply(b, d1, fs, v), w);
  const cplx br2 = inner(v, rho_apply(b, d1, fs, w));
  CHECK(std::abs(br1 - br2) < 1e-12);
}

TEST_CASE("W operator: identities and the commutation lemma") {
  const SpacePartition s = uniform_space(3, {1, 1, 2});
  Rng rng(160);
  const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s, rng.next()));
  const FockSpace fs(3);
  WickEngine engine(b, fs);

  const FockOperator one = FockOperator::from_matrix(
      Matrix::Identity(static_cast<Eigen::Index>(fs.dim), static_cast<Eigen::Index>(fs.dim)));
  for (std::uint64_t m = 0; m < 8; ++m) {
    CHECK(op_distance(w_op(b, m, one, fs), engine.rho(m)) < 1e-12);
    CHECK(w_op(b, 0, engine.rho(m), fs).frobenius_norm() < 1e-13);
  }

  for (int trial = 0; trial < 12; ++trial) {
    const std::uint64_t d1 = rng.next() & 7, d2 = rng.next() & 7, d3 = rng.next() & 7;
    const FockOperator& r = engine.rho(d3);
    const FockOperator lhs = engine.rho(d1) * w_op(b, d2, r, fs);
    const FockOperator rhs = w_op(b, d2, engine.rho(d1) * r, fs) + w_op(b, d1 & d2, r, fs);
    CHECK(op_distance(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("Wick products: pinned small cases and route equality") {
  const SpacePartition s = uniform_space(3, {1, 2, 2});
  Rng rng(170);
  const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s, rng.next()));
  const FockSpace fs(3);
  WickEngine engine(b, fs);

  const std::vector<std::uint64_t> single{0b011};
  CHECK(op_distance(wick_product(b, single, fs), engine.rho(0b011)) < 1e-13);

  // n = 2, equal arguments: rho^2 - rho
  const std::uint64_t m = 0b101;
  const std::vector<std::uint64_t> twice{m, m};
  const FockOperator want = engine.rho(m) * engine.rho(m) - engine.rho(m);
  CHECK(op_distance(wick_product(b, twice, fs), want) < 1e-12);

  // n = 2, disjoint: plain product
  const std::vector<std::uint64_t> disjoint{0b001, 0b110};
  CHECK(op_distance(wick_product(b, disjoint, fs), engine.rho(0b001) * engine.rho(0b110)) < 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::uint64_t> tup{rng.next() & 7, rng.next() & 7, rng.next() & 7};
    const FockOperator rec = wick_product(b, tup, fs, WickRoute::recurrence);
    const FockOperator chain = wick_product(b, tup, fs, WickRoute::w_chain);
    CHECK(op_distance(rec, chain) < 1e-10);

    std::sort(tup.begin(), tup.end());
    const FockOperator sorted = wick_product(b, tup, fs, WickRoute::recurrence);
    CHECK(op_distance(rec, sorted) < 1e-12);
  }

  CHECK_THROWS_AS(wick_product(b, std::vector<std::uint64_t>{}, fs), Error);
}

TEST_CASE("Hermitian-flagged operators guard their vacuum expectations") {
  const JKernelBundle b = worked_example_bundle();
  const FockSpace fs(2);
  const FockOperator rho = rho_delta(b, 1, fs);
  CHECK(rho.hermitian == true);
  CHECK(std::abs(vacuum_expectation(rho).imag()) < 1e-15);
  const std::vector<std::uint64_t> pair{1ull, 2ull};
  CHECK(wick_product(b, pair, fs).hermitian == true);

  FockOperator skew = FockOperator::scalar(fs, cplx(0.0, 1.0));
  skew.hermitian = true;  // deliberately wrong flag
  CHECK_THROWS_AS(vacuum_expectation(skew), Error);
}
