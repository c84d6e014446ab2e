#pragma once

#include <vector>

#include "jdpp/fields.hpp"
#include "jdpp/kernel.hpp"
#include "jdpp/rng.hpp"
#include "jdpp/suites.hpp"

namespace jdpp::test {

inline Vector random_cvec(Rng& rng, int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(rng.normal(), rng.normal());
  return v;
}

inline Matrix random_cmat(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
  return m;
}

inline Matrix kernel2x2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline double op_distance(const FockOperator& a, const FockOperator& b) {
  return (a - b).frobenius_norm();
}

/// Dense anticommutator {A, B} of two field operators.
inline FockOperator anticommutator(const FockSpace& fs, const FieldOp& a, const FieldOp& b) {
  const FockOperator ma = a.to_operator(fs);
  const FockOperator mb = b.to_operator(fs);
  return ma * mb + mb * ma;
}

}  // namespace jdpp::test
