#include "jdpp/dpp.hpp"

#include <bit>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "jdpp/errors.hpp"
#include "jdpp/rng.hpp"

namespace jdpp {

namespace {

constexpr double kNegativeProbAbort = 1e-12;  // clamp above, abort below

void check_table_size(const SpacePartition& space) {
  require(space.d <= kMaxTableSites, Errc::infeasible_size,
          "exact DPP tables capped at d <= " + std::to_string(kMaxTableSites));
}

}  // namespace

double correlation_weight(const Kernel& k, std::uint64_t subset) {
  const auto sites = mask_to_sites(subset, k.d());
  if (sites.empty()) return 1.0;
  const int n = static_cast<int>(sites.size());
  Matrix sub(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      sub(a, b) = k.flat(sites[static_cast<std::size_t>(a)], sites[static_cast<std::size_t>(b)]);
  return sub.determinant().real();
}

DppTable dpp_distribution(const Kernel& k) {
  check_table_size(k.space);
  const ValidationReport v = validate_correlation_operator(k);
  require(v.pass, Errc::validation_failure, "dpp_distribution: kernel fails 0<=K<=1 validation");

  const int d = k.d();
  const std::size_t n_subsets = 1ull << d;
  std::vector<double> corr(n_subsets);
  for (std::uint64_t s = 0; s < n_subsets; ++s) corr[static_cast<std::size_t>(s)] = correlation_weight(k, s);

  DppTable table;
  table.space = k.space;
  table.kernel = k;
  table.probs.assign(n_subsets, 0.0);
  const std::uint64_t full = n_subsets - 1;
  for (std::uint64_t s = 0; s < n_subsets; ++s) {
    const std::uint64_t comp = full ^ s;
    double acc = 0.0;
    // supersets A = s | t with t running over subsets of the complement
    std::uint64_t t = comp;
    while (true) {
      const double term = corr[static_cast<std::size_t>(s | t)];
      acc += (std::popcount(t) & 1) ? -term : term;
      if (t == 0) break;
      t = (t - 1) & comp;
    }
    if (acc < 0.0) {
      require(acc >= -kNegativeProbAbort, Errc::validation_failure,
              "dpp_distribution: negative probability " + std::to_string(acc) +
                  " (kernel slipped through validation)");
      table.clamp_residual = std::min(table.clamp_residual, acc);
      acc = 0.0;
    }
    table.probs[static_cast<std::size_t>(s)] = acc;
  }
  return table;
}

DppTable particle_hole_pushforward(const DppTable& table) {
  DppTable out = table;
  std::fill(out.probs.begin(), out.probs.end(), 0.0);
  const std::uint64_t m1 = table.space.mask1;
  const std::uint64_t m2 = table.space.mask2;
  for (std::uint64_t g = 0; g < table.probs.size(); ++g) {
    const std::uint64_t image = (g & m1) | (m2 & ~g);
    out.probs[static_cast<std::size_t>(image)] += table.probs[static_cast<std::size_t>(g)];
  }
  return out;
}

DppTable j_dpp_distribution(const JKernelBundle& bundle) {
  DppTable pushed = particle_hole_pushforward(dpp_distribution(bundle.K));
  pushed.kernel = bundle.Khat;
  return pushed;
}

double moments_by_enumeration(const DppTable& table, std::span<const std::uint64_t> deltas) {
  require(!deltas.empty(), Errc::invalid_argument, "moments_by_enumeration needs >= 1 subset");
  double total = 0.0;
  for (std::uint64_t s = 0; s < table.probs.size(); ++s) {
    const double p = table.probs[static_cast<std::size_t>(s)];
    if (p == 0.0) continue;
    double term = p;
    for (std::uint64_t delta : deltas) term *= static_cast<double>(std::popcount(s & delta));
    total += term;
  }
  return total;
}

double correlation_from_distribution(const DppTable& table, std::uint64_t subset) {
  double total = 0.0;
  for (std::uint64_t s = 0; s < table.probs.size(); ++s)
    if ((s & subset) == subset) total += table.probs[static_cast<std::size_t>(s)];
  return total;
}

std::vector<std::uint64_t> hkpv_sample(const Kernel& k, std::uint64_t seed, int count) {
  require(count >= 1, Errc::invalid_argument, "sample count must be >= 1");
  const ValidationReport v = validate_correlation_operator(k);
  require(v.pass, Errc::validation_failure, "hkpv_sample: kernel fails 0<=K<=1 validation");

  const int d = k.d();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k.flat + k.flat.adjoint()));
  RealVector lam = es.eigenvalues();
  for (int i = 0; i < d; ++i) lam(i) = std::clamp(lam(i), 0.0, 1.0);
  const Matrix& vecs = es.eigenvectors();

  const Rng base(seed);
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(count));

  for (int s = 0; s < count; ++s) {
    Rng rng = base.split(static_cast<std::uint64_t>(s));

    // elementary-DPP mixture: keep eigenvector i with probability lambda_i
    std::vector<int> picked;
    for (int i = 0; i < d; ++i)
      if (rng.uniform01() < lam(i)) picked.push_back(i);

    std::uint64_t mask = 0;
    if (!picked.empty()) {
      const int r = static_cast<int>(picked.size());
      Matrix sel(d, r);
      for (int j = 0; j < r; ++j) sel.col(j) = vecs.col(picked[static_cast<std::size_t>(j)]);
      Matrix proj = sel * sel.adjoint();  // rank-r projection kernel

      for (int remaining = r; remaining >= 1; --remaining) {
        // site pmf p_i = proj_ii / remaining; CDF inversion in site order
        const double u = rng.uniform01() * static_cast<double>(remaining);
        double cdf = 0.0;
        int site = -1;
        for (int i = 0; i < d; ++i) {
          cdf += std::max(proj(i, i).real(), 0.0);
          if (u < cdf) {
            site = i;
            break;
          }
        }
        if (site < 0) {  // roundoff at the tail
          for (int i = d - 1; i >= 0; --i)
            if (proj(i, i).real() > 0) {
              site = i;
              break;
            }
        }
        require(site >= 0, Errc::validation_failure, "hkpv_sample: degenerate projection step");
        mask |= (1ull << site);

        if (remaining > 1) {
          // Schur complement: remove the sampled site from the projection
          const double pivot = proj(site, site).real();
          require(pivot > 0, Errc::validation_failure, "hkpv_sample: zero pivot");
          const Vector col = proj.col(site);
          const Eigen::RowVectorXcd row = proj.row(site);
          proj -= (col * row) / pivot;
        }
      }
    }
    out.push_back(mask);
  }
  return out;
}

}  // namespace jdpp
