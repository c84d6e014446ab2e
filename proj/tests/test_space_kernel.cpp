#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "jdpp/errors.hpp"
#include "jdpp/generators.hpp"
#include "jdpp/kernel.hpp"
#include "jdpp/kernel_io.hpp"
#include "jdpp/rng.hpp"
#include "support.hpp"

using namespace jdpp;
using test::kernel2x2;
using test::random_cmat;

TEST_CASE("build_space validates and fills derived fields") {
  const SpacePartition s = build_space(3, (RealVector(3) << 0.5, 0.5, 1.0).finished(), {1, 1, 2});
  CHECK(s.d == 3);
  CHECK(s.mask1 == 0b011);
  CHECK(s.mask2 == 0b100);
  CHECK(s.sqrt_sigma(0) == doctest::Approx(std::sqrt(0.5)));

  CHECK_NOTHROW(uniform_space(1, {1}));
  CHECK_NOTHROW(uniform_space(2, {1, 2}));
  CHECK_THROWS_AS(build_space(2, RealVector::Ones(3), {1, 2}), Error);
  CHECK_THROWS_AS(build_space(2, (RealVector(2) << 1.0, -0.5).finished(), {1, 2}), Error);
  CHECK_THROWS_AS(uniform_space(2, {1, 3}), Error);
  CHECK_THROWS_AS(uniform_space(0, {}), Error);
}

TEST_CASE("hat transform on the pinned 2x2 examples") {
  const SpacePartition s = uniform_space(2, {1, 2});
  const Kernel id = make_kernel_flat(s, Matrix::Identity(2, 2));
  const Kernel zero = make_kernel_flat(s, Matrix::Zero(2, 2));
  const Kernel half = make_kernel_flat(s, kernel2x2(0.5, 0.5, 0.5, 0.5));

  CHECK((hat_transform(id).flat - kernel2x2(1, 0, 0, 0)).norm() == doctest::Approx(0.0));
  CHECK((hat_transform(zero).flat - kernel2x2(0, 0, 0, 1)).norm() == doctest::Approx(0.0));
  CHECK((hat_transform(half).flat - kernel2x2(0.5, -0.5, 0.5, 0.5)).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("hat transform is an involution") {
  Rng rng(42);
  for (int d = 1; d <= 6; ++d) {
    std::vector<int> part;
    for (int i = 0; i < d; ++i) part.push_back(rng.uniform01() < 0.5 ? 1 : 2);
    const SpacePartition s = uniform_space(d, part);
    const Kernel k = make_kernel_flat(s, random_cmat(rng, d, d));
    CHECK((hat_transform(hat_transform(k)).flat - k.flat).norm() < 1e-14);
    // hat of a Hermitian kernel is J-self-adjoint and back
    const Kernel herm = make_kernel_flat(s, (k.flat + k.flat.adjoint()) / 2.0);
    CHECK(check_j_self_adjoint(hat_transform(herm), 1e-12).ok);
    const Kernel hatted = hat_transform(herm);
    const Kernel back = hat_transform(hatted);
    CHECK((back.flat - back.flat.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("validate_correlation_operator on the pinned examples") {
  const SpacePartition s = uniform_space(2, {1, 2});

  const auto good = validate_correlation_operator(
      make_kernel_flat(s, Matrix(kernel2x2(0.3, 0, 0, 0.7))));
  CHECK(good.pass);
  CHECK(good.min_eigenvalue == doctest::Approx(0.3));
  CHECK(good.max_eigenvalue == doctest::Approx(0.7));
  CHECK(good.locally_trace_class);

  const auto high = validate_correlation_operator(
      make_kernel_flat(s, Matrix(kernel2x2(1.5, 0, 0, 0))));
  CHECK_FALSE(high.pass);
  CHECK(high.max_eigenvalue == doctest::Approx(1.5));

  Matrix bad(2, 2);
  bad << cplx(0.5, 0), cplx(0, 0.1), cplx(0, 0.1), cplx(0.5, 0);
  const auto nonherm = validate_correlation_operator(make_kernel_flat(s, std::move(bad)));
  CHECK_FALSE(nonherm.hermitian);
  CHECK_FALSE(nonherm.pass);
}

TEST_CASE("sqrt_factors pinned examples") {
  const SpacePartition s = uniform_space(2, {1, 2});
  {
    const auto [k1, k2] = sqrt_factors(make_kernel_flat(s, Matrix(kernel2x2(0.25, 0, 0, 1))));
    CHECK((k1.flat - kernel2x2(0.5, 0, 0, 1)).norm() < 1e-12);
    CHECK((k2.flat - kernel2x2(std::sqrt(0.75), 0, 0, 0)).norm() < 1e-12);
  }
  {
    const auto [k1, k2] = sqrt_factors(make_kernel_flat(s, Matrix::Zero(2, 2)));
    CHECK(k1.flat.norm() < 1e-12);
    CHECK((k2.flat - Matrix::Identity(2, 2)).norm() < 1e-12);
  }
  {
    // rank-1 projection: sqrt(P) = P, sqrt(1-P) = 1-P
    const Matrix p = kernel2x2(0.5, 0.5, 0.5, 0.5);
    const auto [k1, k2] = sqrt_factors(make_kernel_flat(s, Matrix(p)));
    CHECK((k1.flat - p).norm() < 1e-12);
    CHECK((k2.flat - (Matrix::Identity(2, 2) - p)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(sqrt_factors(make_kernel_flat(s, Matrix(kernel2x2(1.5, 0, 0, 0)))), Error);
}

TEST_CASE("sqrt_factors square back to K for random valid kernels up to d=16") {
  for (int d : {2, 5, 9, 16}) {
    std::vector<int> part;
    Rng rng(100 + static_cast<std::uint64_t>(d));
    for (int i = 0; i < d; ++i) part.push_back(rng.uniform01() < 0.5 ? 1 : 2);
    const SpacePartition s = uniform_space(d, part);
    const Kernel k = random_valid_kernel(s, rng.next());
    const auto [k1, k2] = sqrt_factors(k);
    CHECK((k1.flat * k1.flat - k.flat).norm() < 1e-10);
    CHECK((k2.flat * k2.flat - (Matrix::Identity(d, d) - k.flat)).norm() < 1e-10);
    CHECK((k1.flat - k1.flat.adjoint()).norm() < 1e-12);
    CHECK((k2.flat - k2.flat.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("check_j_self_adjoint pinned examples") {
  const SpacePartition s12 = uniform_space(2, {1, 2});
  const SpacePartition s11 = uniform_space(2, {1, 1});
  CHECK(check_j_self_adjoint(make_kernel_flat(s12, Matrix(kernel2x2(0.3, 0, 0, -2.0)))).ok);
  CHECK(check_j_self_adjoint(make_kernel_flat(s11, Matrix(kernel2x2(0.3, 0, 0, -2.0)))).ok);
  CHECK(check_j_self_adjoint(make_kernel_flat(s12, Matrix(kernel2x2(0.5, -0.5, 0.5, 0.5)))).ok);
  CHECK_FALSE(
      check_j_self_adjoint(make_kernel_flat(s12, Matrix(kernel2x2(0.5, 0.5, 0.5, 0.5)))).ok);
  // equivalence with J M J = M^+
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Kernel m = make_kernel_flat(s12, random_cmat(rng, 2, 2));
    const Matrix j = part_projection(s12, 1) - part_projection(s12, 2);
    const bool via_blocks = check_j_self_adjoint(m, 1e-10).ok;
    const bool via_j = (j * m.flat * j - m.flat.adjoint()).norm() < 1e-10;
    CHECK(via_blocks == via_j);
  }
}

TEST_CASE("assemble_j_kernel certifies the block construction") {
  const SpacePartition s = uniform_space(2, {1, 2});
  {
    const JKernelBundle b =
        assemble_j_kernel(make_kernel_flat(s, Matrix(kernel2x2(0.25, 0, 0, 0.75))));
    CHECK((b.Khat.flat - kernel2x2(0.25, 0, 0, 0.25)).norm() < 1e-14);
    CHECK(b.cert.pass);
  }
  {
    const JKernelBundle b =
        assemble_j_kernel(make_kernel_flat(s, Matrix(kernel2x2(0.5, 0.5, 0.5, 0.5))));
    CHECK((b.Khat.flat - kernel2x2(0.5, -0.5, 0.5, 0.5)).norm() < 1e-12);
  }
  {
    Rng rng(5);
    const SpacePartition s4 = uniform_space(4, {1, 1, 2, 2});
    const JKernelBundle b = assemble_j_kernel(random_valid_kernel(s4, rng.next()));
    CHECK(b.cert.block11_residual < 1e-12);
    CHECK(b.cert.block22_residual < 1e-12);
    CHECK(b.cert.block21_residual < 1e-12);
    CHECK(b.cert.block12_residual < 1e-12);
    CHECK(b.cert.jsa.ok);
  }
}

TEST_CASE("correlation_determinant pinned values and nonnegativity") {
  const JKernelBundle b = worked_example_bundle();
  CHECK(correlation_determinant(b.Khat, {0, 1}) == doctest::Approx(0.5));
  CHECK(correlation_determinant(b.Khat, {0}) == doctest::Approx(0.5));
  CHECK(correlation_determinant(b.Khat, {}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(correlation_determinant(b.Khat, {0, 0}), Error);
  CHECK_THROWS_AS(correlation_determinant(b.Khat, {0, 5}), Error);

  // 1000 random draws per d <= 6 stay above -1e-12
  double min_det = 0;
  for (int d = 1; d <= 6; ++d) {
    Rng rng(500 + static_cast<std::uint64_t>(d));
    for (int i = 0; i < 1000; ++i) {
      const JKernelBundle rb = random_bundle(d, rng.next());
      const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
      std::vector<int> sites;
      for (int t = 0; t < d; ++t) sites.push_back(t);
      for (int t = d - 1; t > 0; --t)
        std::swap(sites[static_cast<std::size_t>(t)],
                  sites[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(t + 1)))]);
      sites.resize(static_cast<std::size_t>(n));
      min_det = std::min(min_det, correlation_determinant(rb.Khat, sites));
    }
  }
  CHECK(min_det >= -1e-12);
}

TEST_CASE("flat determinants equal weighted pointwise determinants") {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(4));
    std::vector<int> part;
    RealVector sigma(d);
    for (int i = 0; i < d; ++i) {
      part.push_back(rng.uniform01() < 0.5 ? 1 : 2);
      sigma(i) = rng.uniform(0.25, 3.0);
    }
    const SpacePartition s = build_space(d, sigma, part);
    const Kernel k = random_valid_kernel(s, rng.next());

    const std::uint64_t mask = rng.next() & s.full_mask();
    const auto sites = mask_to_sites(mask, d);
    if (sites.empty()) continue;
    const int n = static_cast<int>(sites.size());
    Matrix pw(n, n);
    double weight = 1.0;
    for (int a = 0; a < n; ++a) {
      weight *= sigma(sites[static_cast<std::size_t>(a)]);
      for (int bcol = 0; bcol < n; ++bcol)
        pw(a, bcol) = k.pointwise(sites[static_cast<std::size_t>(a)],
                                  sites[static_cast<std::size_t>(bcol)]);
    }
    Matrix fl(n, n);
    for (int a = 0; a < n; ++a)
      for (int bcol = 0; bcol < n; ++bcol)
        fl(a, bcol) = k.flat(sites[static_cast<std::size_t>(a)],
                             sites[static_cast<std::size_t>(bcol)]);
    const double lhs = fl.determinant().real();
    const double rhs = pw.determinant().real() * weight;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("growth_bound_constant pinned values") {
  {
    const JKernelBundle b = worked_example_bundle();
    CHECK(growth_bound_constant(b, 0).general == 0.0);
    CHECK(growth_bound_constant(b, 0).refined.value() == 0.0);

    const GrowthConstant g = growth_bound_constant(b, 0b11);
    // independent norms of Khat = [[.5,-.5],[.5,.5]]
    Eigen::JacobiSVD<Matrix> svd(b.Khat.flat);
    CHECK(g.operator_norm == doctest::Approx(svd.singularValues().maxCoeff()));
    CHECK(g.frobenius_norm == doctest::Approx(b.Khat.flat.norm()));
    CHECK_FALSE(g.refined.has_value());  // Delta straddles both parts
    CHECK(g.general == doctest::Approx(std::max({g.trace_norm_sum, g.frobenius_norm,
                                                 g.operator_norm})));
  }
  {
    const double p = 0.3;
    const SpacePartition s1 = uniform_space(1, {1});
    const JKernelBundle b1 = assemble_j_kernel(make_kernel_flat(s1, Matrix::Constant(1, 1, p)));
    const GrowthConstant g = growth_bound_constant(b1, 1);
    CHECK(g.refined.value() == doctest::Approx(p));
  }
}

TEST_CASE("kernel JSON round trip and pointwise ingestion") {
  Rng rng(11);
  const SpacePartition s = build_space(3, (RealVector(3) << 0.5, 1.0, 2.0).finished(), {1, 2, 2});
  const Kernel k = random_valid_kernel(s, rng.next());

  const Kernel back = kernel_from_json(kernel_to_json(k));
  CHECK((back.flat - k.flat).norm() < 1e-15);
  CHECK(back.space.part == k.space.part);

  // pointwise coordinates land on the same flat matrix
  nlohmann::json doc = kernel_to_json(k);
  doc["coords"] = "pointwise";
  const Matrix pw = k.pointwise_matrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      doc["matrix"]["re"][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          pw(i, j).real();
      doc["matrix"]["im"][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          pw(i, j).imag();
    }
  const Kernel via_pw = kernel_from_json(doc);
  CHECK((via_pw.flat - k.flat).norm() < 1e-12);

  CHECK_THROWS_AS(kernel_from_json(nlohmann::json{{"d", 2}}), Error);
}

TEST_CASE("named generators produce valid kernels") {
  const SpacePartition s = uniform_space(5, {1, 1, 2, 2, 2});
  CHECK(validate_correlation_operator(random_valid_kernel(s, 1)).pass);
  CHECK(validate_correlation_operator(discrete_sine_kernel(s, 0.4)).pass);

  const Kernel proj = projection_kernel(s, 2, 3);
  CHECK(validate_correlation_operator(proj).pass);
  CHECK(proj.flat.trace().real() == doctest::Approx(2.0));  // rank
  CHECK((proj.flat * proj.flat - proj.flat).norm() < 1e-12);

  // determinism per seed
  CHECK((random_valid_kernel(s, 77).flat - random_valid_kernel(s, 77).flat).norm() == 0.0);
  CHECK((random_valid_kernel(s, 77).flat - random_valid_kernel(s, 78).flat).norm() > 1e-3);
  CHECK_THROWS_AS(projection_kernel(s, 9, 1), Error);
}
