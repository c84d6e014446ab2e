#pragma once

namespace jdpp {

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

/// P(Chi2_dof >= stat).
double chi_square_pvalue(double stat, int dof);

}  // namespace jdpp
