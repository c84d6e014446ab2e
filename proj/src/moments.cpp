#include "jdpp/moments.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>

#include "jdpp/errors.hpp"

namespace jdpp {

namespace {

constexpr double kImagBudget = 1e-10;

double real_checked(cplx value, const char* what) {
  require(std::abs(value.imag()) <= kImagBudget * std::max(1.0, std::abs(value.real())),
          Errc::validation_failure,
          std::string(what) + ": imaginary residue " + std::to_string(value.imag()));
  return value.real();
}

int count_crossings(const std::vector<std::pair<int, int>>& pairs) {
  int c = 0;
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = 0; b < pairs.size(); ++b) {
      if (a == b) continue;
      if (pairs[a].first < pairs[b].first && pairs[b].first < pairs[a].second &&
          pairs[a].second < pairs[b].second)
        ++c;
    }
  return c;
}

void enumerate_partitions(std::vector<int>& free_points, std::vector<std::pair<int, int>>& acc,
                          std::vector<PairPartition>& out) {
  if (free_points.empty()) {
    PairPartition p;
    p.pairs = acc;
    p.crossings = count_crossings(acc);
    out.push_back(std::move(p));
    return;
  }
  const int first = free_points.front();
  for (std::size_t pick = 1; pick < free_points.size(); ++pick) {
    std::vector<int> rest;
    rest.reserve(free_points.size() - 2);
    for (std::size_t t = 1; t < free_points.size(); ++t)
      if (t != pick) rest.push_back(free_points[t]);
    acc.emplace_back(first, free_points[pick]);
    enumerate_partitions(rest, acc, out);
    acc.pop_back();
  }
}

}  // namespace

std::vector<PairPartition> pair_partitions(int n2) {
  require(n2 >= 2 && n2 % 2 == 0, Errc::invalid_argument, "pair_partitions needs a positive even count");
  require(n2 <= kMaxPairPartitionPoints, Errc::infeasible_size,
          "pair_partitions capped at " + std::to_string(kMaxPairPartitionPoints) + " points");
  std::vector<int> points(static_cast<std::size_t>(n2));
  std::iota(points.begin(), points.end(), 0);
  std::vector<PairPartition> out;
  std::vector<std::pair<int, int>> acc;
  enumerate_partitions(points, acc, out);
  return out;
}

cplx quasi_free_expectation(std::span<const Vector> vectors, std::span<const FieldSign> signs) {
  require(vectors.size() == signs.size(), Errc::dimension_mismatch,
          "quasi_free_expectation: vector/sign count mismatch");
  const int L = static_cast<int>(vectors.size());
  if (L == 0) return 1.0;
  if (L % 2 != 0) return 0.0;
  require(L <= kMaxPairPartitionPoints, Errc::infeasible_size,
          "quasi_free_expectation capped at 12 factors");
  const long plus = std::count(signs.begin(), signs.end(), FieldSign::plus);
  if (2 * plus != L) return 0.0;

  // Admissible pairings put the minus at the smaller index; recursion pairs
  // the first free point and prunes inadmissible branches early.
  cplx total = 0.0;
  std::vector<std::pair<int, int>> acc;
  std::vector<int> free_points(static_cast<std::size_t>(L));
  std::iota(free_points.begin(), free_points.end(), 0);

  std::function<void(std::vector<int>&)> recurse = [&](std::vector<int>& pts) {
    if (pts.empty()) {
      cplx term = (count_crossings(acc) & 1) ? -1.0 : 1.0;
      for (const auto& [i, j] : acc)
        term *= inner(vectors[static_cast<std::size_t>(j)], vectors[static_cast<std::size_t>(i)]);
      total += term;
      return;
    }
    const int first = pts.front();
    if (signs[static_cast<std::size_t>(first)] != FieldSign::minus) return;  // no admissible pairing
    for (std::size_t pick = 1; pick < pts.size(); ++pick) {
      if (signs[static_cast<std::size_t>(pts[pick])] != FieldSign::plus) continue;
      std::vector<int> rest;
      rest.reserve(pts.size() - 2);
      for (std::size_t t = 1; t < pts.size(); ++t)
        if (t != pick) rest.push_back(pts[t]);
      acc.emplace_back(first, pts[pick]);
      recurse(rest);
      acc.pop_back();
    }
  };
  recurse(free_points);
  return total;
}

double cycle_trace_moment(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas) {
  const int n = static_cast<int>(deltas.size());
  require(n >= 1, Errc::invalid_argument, "cycle_trace_moment needs at least one subset");
  require(n <= kMaxCycleMomentOrder, Errc::infeasible_size,
          "cycle_trace_moment capped at order " + std::to_string(kMaxCycleMomentOrder));

  const int d = bundle.d();
  // Per-argument restricted factors P_Delta * Khat and split traces.
  std::vector<Matrix> restricted(static_cast<std::size_t>(n));
  std::vector<cplx> split_trace(static_cast<std::size_t>(n), 0.0);
  for (int t = 0; t < n; ++t) {
    Matrix r = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
      if ((deltas[static_cast<std::size_t>(t)] >> i) & 1ull) {
        r.row(i) = bundle.Khat.flat.row(i);
        split_trace[static_cast<std::size_t>(t)] += bundle.Khat.flat(i, i);
      }
    restricted[static_cast<std::size_t>(t)] = std::move(r);
  }

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  cplx total = 0.0;
  std::vector<bool> seen(static_cast<std::size_t>(n));
  do {
    std::fill(seen.begin(), seen.end(), false);
    cplx term = 1.0;
    int sign = 1;
    for (int s = 0; s < n && term != 0.0; ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      // walk the cycle starting at its smallest element
      std::vector<int> cycle{s};
      seen[static_cast<std::size_t>(s)] = true;
      for (int t = perm[static_cast<std::size_t>(s)]; t != s; t = perm[static_cast<std::size_t>(t)]) {
        cycle.push_back(t);
        seen[static_cast<std::size_t>(t)] = true;
      }
      if (cycle.size() % 2 == 0) sign = -sign;
      if (cycle.size() == 1) {
        term *= split_trace[static_cast<std::size_t>(cycle[0])];
      } else {
        Matrix prod = restricted[static_cast<std::size_t>(cycle[0])];
        for (std::size_t t = 1; t < cycle.size(); ++t)
          prod = prod * restricted[static_cast<std::size_t>(cycle[t])];
        term *= prod.trace();
      }
    }
    total += static_cast<double>(sign) * term;
  } while (std::next_permutation(perm.begin(), perm.end()));

  return real_checked(total, "cycle_trace_moment");
}

double determinant_moment_sum(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas) {
  const int n = static_cast<int>(deltas.size());
  require(n >= 1, Errc::invalid_argument, "determinant_moment_sum needs at least one subset");
  require(n <= kMaxDeterminantMomentOrder, Errc::infeasible_size,
          "determinant_moment_sum capped at order " + std::to_string(kMaxDeterminantMomentOrder));

  std::vector<std::vector<int>> sites(static_cast<std::size_t>(n));
  long long tuples = 1;
  for (int t = 0; t < n; ++t) {
    sites[static_cast<std::size_t>(t)] = mask_to_sites(deltas[static_cast<std::size_t>(t)], bundle.d());
    if (sites[static_cast<std::size_t>(t)].empty()) return 0.0;
    tuples *= static_cast<long long>(sites[static_cast<std::size_t>(t)].size());
    require(tuples <= kMaxDeterminantTuples, Errc::infeasible_size,
            "determinant_moment_sum: tuple count exceeds cap");
  }

  std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
  std::vector<int> pick(static_cast<std::size_t>(n));
  cplx total = 0.0;
  while (true) {
    std::uint64_t used = 0;
    bool repeated = false;
    for (int t = 0; t < n; ++t) {
      pick[static_cast<std::size_t>(t)] = sites[static_cast<std::size_t>(t)][odo[static_cast<std::size_t>(t)]];
      const std::uint64_t bit = 1ull << pick[static_cast<std::size_t>(t)];
      if (used & bit) {
        repeated = true;
        break;
      }
      used |= bit;
    }
    if (!repeated) {
      Matrix sub(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          sub(a, b) = bundle.Khat.flat(pick[static_cast<std::size_t>(a)],
                                       pick[static_cast<std::size_t>(b)]);
      total += sub.determinant();
    }
    int t = n - 1;
    for (; t >= 0; --t) {
      if (++odo[static_cast<std::size_t>(t)] < sites[static_cast<std::size_t>(t)].size()) break;
      odo[static_cast<std::size_t>(t)] = 0;
    }
    if (t < 0) break;
  }
  return real_checked(total, "determinant_moment_sum");
}

double correlation_measure(WickEngine& engine, const std::vector<std::uint64_t>& deltas) {
  const int n = static_cast<int>(deltas.size());
  require(n >= 1, Errc::invalid_argument, "correlation_measure needs at least one subset");
  require(n <= kMaxFockMomentOrder, Errc::infeasible_size,
          "correlation_measure (Fock route) capped at order " +
              std::to_string(kMaxFockMomentOrder));
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  const cplx tau = engine.wick(deltas).vacuum_expectation();
  return real_checked(tau, "correlation_measure") / fact;
}

double correlation_measure(const JKernelBundle& bundle, std::span<const std::uint64_t> deltas,
                           const FockSpace& fs) {
  WickEngine engine(bundle, fs);
  return correlation_measure(engine, std::vector<std::uint64_t>(deltas.begin(), deltas.end()));
}

namespace {

struct CMatrices {
  // c[s1][s2], s = 0 minus / 1 plus, flat d x d
  std::array<std::array<Matrix, 2>, 2> c;
};

CMatrices c_matrices(const JKernelBundle& bundle, std::uint64_t piece, bool in_part1) {
  const Matrix p = subset_projection(bundle.space(), piece);
  const Matrix& k1 = bundle.K1.flat;
  const Matrix& k2 = bundle.K2.flat;
  CMatrices out;
  auto& c = out.c;
  constexpr int minus = 0, plus = 1;
  if (in_part1) {
    c[plus][plus] = k2 * p * k1;
    c[minus][minus] = k1 * p * k2;
    c[plus][minus] = k2 * p * k2;
    c[minus][plus] = k1 * p * k1;
  } else {
    c[plus][plus] = (k2 * p * k1).transpose();
    c[minus][minus] = (k1 * p * k2).transpose();
    c[plus][minus] = (k1 * p * k1).transpose();
    c[minus][plus] = (k2 * p * k2).transpose();
  }
  return out;
}

}  // namespace

double pairing_expansion_moment(const JKernelBundle& bundle,
                                std::span<const std::uint64_t> deltas) {
  const int n = static_cast<int>(deltas.size());
  require(n >= 1, Errc::invalid_argument, "pairing_expansion_moment needs at least one subset");
  require(n <= kMaxPairingOrder && bundle.d() <= kMaxPairingSites, Errc::infeasible_size,
          "pairing_expansion_moment capped at n <= 3, d <= 3 (oracle-grade route)");

  const int d = bundle.d();
  for (std::uint64_t delta : deltas)
    if (delta == 0) return 0.0;  // rho(empty) = 0 kills the product

  // G basis vectors iota_1 e_i, iota_2 e_i
  std::vector<Vector> basis1(static_cast<std::size_t>(d)), basis2(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Vector b1 = Vector::Zero(2 * d), b2 = Vector::Zero(2 * d);
    b1(i) = 1.0;
    b2(d + i) = 1.0;
    basis1[static_cast<std::size_t>(i)] = std::move(b1);
    basis2[static_cast<std::size_t>(i)] = std::move(b2);
  }

  const std::uint64_t m1 = bundle.space().mask1;

  // Multilinearity: split every subset into its one-sided pieces and sum
  // over the choice per slot.
  std::vector<std::vector<std::uint64_t>> choices(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const std::uint64_t a = deltas[static_cast<std::size_t>(t)] & m1;
    const std::uint64_t b = deltas[static_cast<std::size_t>(t)] & ~m1 & bundle.space().full_mask();
    auto& c = choices[static_cast<std::size_t>(t)];
    if (a) c.push_back(a);
    if (b) c.push_back(b);
  }

  cplx total = 0.0;
  std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
  while (true) {
    // assignment: one-sided pieces, X1 pieces first (the Wick product is
    // permutation symmetric, so sorting is harmless)
    std::vector<std::uint64_t> pieces;
    for (int t = 0; t < n; ++t)
      pieces.push_back(choices[static_cast<std::size_t>(t)][odo[static_cast<std::size_t>(t)]]);
    std::stable_sort(pieces.begin(), pieces.end(), [&](std::uint64_t a, std::uint64_t b) {
      return ((a & m1) != 0) > ((b & m1) != 0);
    });
    std::vector<bool> is1;
    int n2_pieces = 0;
    for (std::uint64_t piece : pieces) {
      is1.push_back((piece & m1) != 0);
      if (!is1.back()) ++n2_pieces;
    }
    std::vector<CMatrices> cs;
    cs.reserve(pieces.size());
    for (std::size_t t = 0; t < pieces.size(); ++t)
      cs.push_back(c_matrices(bundle, pieces[t], is1[t]));

    // free sign slots: unprimed + primed for each X2 piece
    const int free_slots = 2 * n2_pieces;
    for (int pattern = 0; pattern < (1 << free_slots); ++pattern) {
      // signs per slot, word positions: t at t, primed t at 2n-1-t
      std::vector<int> sign_unprimed(pieces.size()), sign_primed(pieces.size());
      int bit = 0;
      for (std::size_t t = 0; t < pieces.size(); ++t) {
        if (is1[t]) {
          sign_unprimed[t] = 0;  // minus
          sign_primed[t] = 1;    // plus
        } else {
          sign_unprimed[t] = (pattern >> bit++) & 1;
          sign_primed[t] = (pattern >> bit++) & 1;
        }
      }

      // iterate basis indices (i_t, i_t') per piece
      const std::size_t combos_per = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
      std::vector<std::size_t> idx(pieces.size(), 0);
      while (true) {
        cplx coeff = 1.0;
        for (std::size_t t = 0; t < pieces.size() && coeff != 0.0; ++t) {
          const int i = static_cast<int>(idx[t]) / d;
          const int ip = static_cast<int>(idx[t]) % d;
          coeff *= cs[t].c[static_cast<std::size_t>(sign_unprimed[t])]
                          [static_cast<std::size_t>(sign_primed[t])](i, ip);
        }
        if (coeff != 0.0) {
          const std::size_t len = 2 * pieces.size();
          std::vector<Vector> word(len);
          std::vector<FieldSign> word_signs(len);
          for (std::size_t t = 0; t < pieces.size(); ++t) {
            const int i = static_cast<int>(idx[t]) / d;
            const int ip = static_cast<int>(idx[t]) % d;
            // X1 piece: A-letter unprimed, B-letter primed; X2 the reverse.
            // A+ = copy-2 creator, A- = copy-1 annihilator,
            // B+ = copy-1 creator, B- = copy-2 annihilator.
            auto letter = [&](bool a_letter, int sgn, int index) -> std::pair<Vector, FieldSign> {
              const bool plus = sgn == 1;
              if (a_letter)
                return {plus ? basis2[static_cast<std::size_t>(index)]
                             : basis1[static_cast<std::size_t>(index)],
                        plus ? FieldSign::plus : FieldSign::minus};
              return {plus ? basis1[static_cast<std::size_t>(index)]
                           : basis2[static_cast<std::size_t>(index)],
                      plus ? FieldSign::plus : FieldSign::minus};
            };
            auto [vu, su] = letter(is1[t], sign_unprimed[t], i);
            word[t] = std::move(vu);
            word_signs[t] = su;
            auto [vp, sp] = letter(!is1[t], sign_primed[t], ip);
            word[len - 1 - t] = std::move(vp);
            word_signs[len - 1 - t] = sp;
          }
          total += coeff * quasi_free_expectation(word, word_signs);
        }
        int adv = static_cast<int>(pieces.size()) - 1;
        for (; adv >= 0; --adv) {
          if (++idx[static_cast<std::size_t>(adv)] < combos_per) break;
          idx[static_cast<std::size_t>(adv)] = 0;
        }
        if (adv < 0) break;
      }
    }

    int t = n - 1;
    for (; t >= 0; --t) {
      if (++odo[static_cast<std::size_t>(t)] < choices[static_cast<std::size_t>(t)].size()) break;
      odo[static_cast<std::size_t>(t)] = 0;
    }
    if (t < 0) break;
  }
  return real_checked(total, "pairing_expansion_moment");
}

namespace {

Vector jj_map(const JKernelBundle& bundle, const Vector& phi) {
  // JJ phi = P1 phi + P2 conj(phi)
  Vector out = phi;
  for (int i = 0; i < bundle.d(); ++i)
    if (bundle.space().in_part(i, 2)) out(i) = std::conj(phi(i));
  return out;
}

}  // namespace

cplx two_point_T_closed(const JKernelBundle& bundle, const Vector& phi, const Vector& psi) {
  const Vector jphi = jj_map(bundle, phi);
  const Vector jpsi = jj_map(bundle, psi);
  const cplx kterm = inner(bundle.K.flat * jphi, jpsi);
  return cplx(0.0, 2.0 * kterm.imag()) + inner(jpsi, jphi);
}

cplx two_point_T_fock(const JKernelBundle& bundle, const Vector& phi, const Vector& psi,
                      const FockSpace& fs) {
  const FieldPair a = bogoliubov_fields(bundle, phi, fs);
  const FieldPair b = bogoliubov_fields(bundle, psi, fs);
  const FieldOp bphi = a.plus + a.minus;
  const FieldOp bpsi = b.plus + b.minus;
  FockVector v = vacuum(fs);
  v = bpsi.apply(fs, v);
  v = bphi.apply(fs, v);
  return v(0);
}

cplx npoint_S_fock(const JKernelBundle& bundle, std::span<const Vector> phis,
                   std::span<const Vector> psis, const FockSpace& fs) {
  const std::size_t m = phis.size(), n = psis.size();
  require(m + n >= 1, Errc::invalid_argument, "npoint_S needs at least one factor");
  require(m + n <= 6, Errc::infeasible_size, "npoint_S capped at m+n <= 6");
  if ((m + n) % 2 != 0) return 0.0;

  FockVector v = vacuum(fs);
  for (std::size_t i = n; i-- > 0;)
    v = bogoliubov_fields(bundle, psis[i], fs).minus.apply(fs, v);
  for (std::size_t i = m; i-- > 0;)
    v = bogoliubov_fields(bundle, phis[i], fs).plus.apply(fs, v);
  return v(0);
}

cplx npoint_S_closed_11(const JKernelBundle& bundle, const Vector& phi, const Vector& psi) {
  const Matrix p1 = part_projection(bundle.space(), 1);
  const Matrix p2 = part_projection(bundle.space(), 2);
  const Matrix m =
      p1 * bundle.Khat.flat * p1 + p2 * bundle.Khat.flat.conjugate() * p2;
  return inner(m * phi, psi);
}

cplx npoint_S_closed_20(const JKernelBundle& bundle, const Vector& phi, const Vector& psi) {
  const int d = bundle.d();
  const Matrix p1 = part_projection(bundle.space(), 1);
  const Matrix p2 = part_projection(bundle.space(), 2);
  const Matrix one = Matrix::Identity(d, d);
  const Matrix m =
      p2 * bundle.K.flat * p1 + p1 * (one - bundle.K.flat).conjugate() * p2;
  return (psi.transpose() * (m * phi)).value();
}

cplx npoint_S_closed_02(const JKernelBundle& bundle, const Vector& phi, const Vector& psi) {
  return std::conj(npoint_S_closed_20(bundle, psi, phi));
}

GrowthCheck growth_bound_check(const JKernelBundle& bundle, std::uint64_t delta, int n_max,
                               const FockSpace* fs) {
  require(n_max >= 1 && n_max <= kMaxCycleMomentOrder, Errc::infeasible_size,
          "growth_bound_check order out of range");
  GrowthCheck g;
  g.delta = delta;
  g.n_max = n_max;
  g.constant = growth_bound_constant(bundle, delta);

  std::unique_ptr<WickEngine> engine;
  if (fs != nullptr && fs->dense_ok()) engine = std::make_unique<WickEngine>(bundle, *fs);

  double fact = 1.0;
  g.ok = true;
  for (int n = 1; n <= n_max; ++n) {
    fact *= n;
    const std::vector<std::uint64_t> reps(static_cast<std::size_t>(n), delta);
    double theta;
    if (engine && n <= kMaxFockMomentOrder) {
      theta = correlation_measure(*engine, reps);
    } else {
      theta = cycle_trace_moment(bundle, reps) / fact;
    }
    g.theta.push_back(theta);
    g.bound_general.push_back(std::pow(g.constant.general, n));
    if (g.constant.refined) g.bound_refined.push_back(std::pow(*g.constant.refined, n));
    if (theta > g.bound_general.back() + g.slack) g.ok = false;
    if (g.constant.refined && theta > g.bound_refined.back() + g.slack) g.ok = false;
  }
  return g;
}

MomentReport moment_report(WickEngine& engine, const std::vector<std::uint64_t>& deltas,
                           bool want_pairing) {
  MomentReport r;
  r.deltas = deltas;
  const int n = static_cast<int>(deltas.size());
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  r.value_fock = fact * correlation_measure(engine, deltas);
  r.value_cycle = cycle_trace_moment(engine.bundle(), deltas);
  r.value_det = determinant_moment_sum(engine.bundle(), deltas);
  if (want_pairing && n <= kMaxPairingOrder && engine.bundle().d() <= kMaxPairingSites)
    r.value_pairing = pairing_expansion_moment(engine.bundle(), deltas);

  std::vector<double> vals{r.value_fock, r.value_cycle, r.value_det};
  if (r.value_pairing) vals.push_back(*r.value_pairing);
  double disc = 0;
  for (std::size_t a = 0; a < vals.size(); ++a)
    for (std::size_t b = a + 1; b < vals.size(); ++b)
      disc = std::max(disc, std::abs(vals[a] - vals[b]));
  r.max_discrepancy = disc;
  return r;
}

}  // namespace jdpp
