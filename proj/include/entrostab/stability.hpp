#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "entrostab/minimizer.hpp"

namespace entrostab {

// Outcome of a Monte-Carlo verification run of the stability inequality
//   S(rho) - S_min >= C * dist_1(rho, M)^2.
struct StabilityReport {
  double s_min = 0.0;
  std::optional<double> c1_estimate;  // nullopt: not applicable
  double assembled_c = 0.0;
  std::int64_t samples = 0;
  std::optional<double> min_ratio;  // inf over samples of gap / dist^2
  std::int64_t violations = 0;
  std::optional<double> empirical_best_c;  // == min_ratio
  std::uint64_t seed = 0;
};

// Empirical marginal-rigidity constant: the sampled infimum over p in Pi
// of (H(p) - H_min) / dist_1(p, Q*)^2, measured against the minimizing
// SET Q* rather than a single extreme point (against a fixed q the bound
// fails whenever two extreme points tie at the minimal entropy). Returns
// nullopt when Pi is a singleton, where the marginal term vanishes
// identically (or, degenerately, when no sample lands a usable distance
// away from Q*). Sample k depends only on (seed, k), so estimates are
// nested: growing the budget can only lower the infimum.
inline std::optional<double> estimate_c1(
    const MarginalPolytope& pi,
    const std::vector<ProbabilityVector>& minimizing_marginals,
    std::int64_t n_samples, std::uint64_t seed) {
  if (pi.is_singleton()) return std::nullopt;

  double h_min = infinity;
  for (const auto& q : minimizing_marginals)
    h_min = std::min(h_min, shannon_entropy(q));

  double inf_ratio = infinity;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const ProbabilityVector p = sample_marginal(
        pi, derive_seed(seed, seed_tag::c1, static_cast<std::uint64_t>(k)));
    double d = infinity;
    for (const auto& q : minimizing_marginals)
      d = std::min(d, (p.weights() - q.weights()).cwiseAbs().sum());
    if (d < tol::min_distance) continue;
    inf_ratio = std::min(inf_ratio, (shannon_entropy(p) - h_min) / (d * d));
  }
  if (inf_ratio == infinity) return std::nullopt;
  return std::max(0.0, inf_ratio);
}

// C = (1/2) min{c1, 1/2}. Without a marginal constant (singleton Pi)
// only the per-block Pinsker route remains and C = 1/4.
inline double assemble_constant(std::optional<double> c1) {
  if (!c1) return 0.25;
  return 0.5 * std::min(*c1, 0.5);
}

namespace detail {

// A random element of the minimizer set M: a random minimizing marginal
// with per-block minimal-entropy conditionals (Haar pure for Full, the
// fixed state for Singleton, a random tied generator for Hull).
inline BlockState random_minimizer(const BlockConvexSet& c,
                                   const MinimizerDescription& md,
                                   CounterRng& rng) {
  const auto& marginals = md.minimizing_marginals;
  const ProbabilityVector& q =
      marginals[rng.next_u64() % marginals.size()];
  const int r = c.block_count();
  std::vector<std::optional<DensityMatrix>> conds(r);
  for (int i = 0; i < r; ++i) {
    if (q[i] <= 0.0) continue;
    const ConditionalSet& set = c.conditional_set(i);
    switch (set.kind()) {
      case ConditionalSet::Kind::Full:
        conds[i] = DensityMatrix::pure(
            rng.pure_state(c.decomposition().block_dim(i)));
        break;
      case ConditionalSet::Kind::Singleton:
        conds[i] = set.state();
        break;
      case ConditionalSet::Kind::Hull: {
        const auto tied =
            tied_min_entropy_generators(set, md.per_block_min_entropy[i]);
        conds[i] = *tied[rng.next_u64() % tied.size()];
        break;
      }
    }
  }
  return BlockState(c.decomposition(), q, std::move(conds));
}

// Shared sampling loop. Odd sample indices are near-minimizer stress
// samples: a random minimizer mixed with a random member at weight u,
// log-uniform in [1e-6, 1e-1], to probe the small-gap regime where the
// inequality binds.
inline StabilityReport run_verification(const BlockConvexSet& c,
                                        const MinimizerDescription& md,
                                        std::optional<double> c1,
                                        double assembled_c,
                                        std::int64_t n_samples,
                                        std::uint64_t seed) {
  StabilityReport report;
  report.s_min = md.s_min;
  report.c1_estimate = c1;
  report.assembled_c = assembled_c;
  report.samples = n_samples;
  report.seed = seed;

  double min_ratio = infinity;
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const std::uint64_t uk = static_cast<std::uint64_t>(k);
    BlockState bs = sample_member(c, derive_seed(seed, seed_tag::sample, uk));
    if (k % 2 == 1) {
      CounterRng rng(derive_seed(seed, seed_tag::stress, uk));
      const BlockState minimizer = random_minimizer(c, md, rng);
      const double u = std::pow(10.0, rng.uniform(-6.0, -1.0));
      bs = mix(bs, minimizer, u);
    }
    const double gap = entropy_of_blockstate(bs) - md.s_min;
    const double dist = distance_to_minimizers(c, bs, md).distance;
    if (gap < assembled_c * dist * dist - tol::violation)
      ++report.violations;
    if (dist >= tol::min_distance)
      min_ratio = std::min(min_ratio, gap / (dist * dist));
  }
  if (min_ratio != infinity) {
    report.min_ratio = min_ratio;
    report.empirical_best_c = min_ratio;
  }
  return report;
}

}  // namespace detail

// Monte-Carlo verification of the stability inequality over a
// block-convex set, with the constant assembled from the empirical
// marginal-rigidity estimate.
inline StabilityReport verify_stability(const BlockConvexSet& c,
                                        std::int64_t n_samples,
                                        std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const MinimizerDescription md = minimize_entropy(c);
  const std::optional<double> c1 =
      estimate_c1(c.marginal(), md.minimizing_marginals, n_samples,
                  derive_seed(seed, seed_tag::c1));
  return detail::run_verification(c, md, c1, assemble_constant(c1), n_samples,
                                  seed);
}

// One-parameter family p_eps = q + eps*v probing how the entropy gap
// scales with distance to the minimizing marginals.
struct SharpnessReport {
  std::vector<double> epsilons;  // strictly decreasing
  std::vector<double> gaps;
  std::vector<double> distances;
  double fitted_exponent;         // NaN with fewer than 2 usable points
  double directional_derivative;  // +-infinity when divergent
  bool derivative_divergent;
};

namespace detail {

inline void validate_ladder(const std::vector<double>& epsilons) {
  if (epsilons.empty())
    throw std::invalid_argument("epsilon ladder must be nonempty");
  for (size_t k = 1; k < epsilons.size(); ++k)
    if (!(epsilons[k] < epsilons[k - 1]))
      throw std::invalid_argument("epsilon ladder must be strictly decreasing");
}

// Least-squares slope of log(gap) against log(distance) over the points
// with positive entries. NaN when fewer than two survive.
inline double fit_exponent(const std::vector<double>& distances,
                           const std::vector<double>& gaps) {
  std::vector<double> xs, ys;
  for (size_t k = 0; k < gaps.size(); ++k)
    if (gaps[k] > 0.0 && distances[k] > 0.0) {
      xs.push_back(std::log(distances[k]));
      ys.push_back(std::log(gaps[k]));
    }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  return sxy / sxx;
}

// Directional derivative of H at q along v: -sum_i v_i log q_i, with a
// divergence flag when v moves mass on a zero coordinate.
inline std::pair<double, bool> directional_derivative(
    const ProbabilityVector& q, const RealVector& v) {
  double d = 0.0;
  bool divergent = false;
  double divergent_sign = 0.0;
  for (int i = 0; i < q.size(); ++i) {
    if (v[i] == 0.0) continue;
    if (q[i] <= 0.0) {
      divergent = true;
      divergent_sign += v[i];
    } else {
      d -= v[i] * std::log(q[i]);
    }
  }
  if (divergent) return {divergent_sign >= 0.0 ? infinity : -infinity, true};
  return {d, false};
}

}  // namespace detail

// Classical sharpness family on the marginal polytope.
inline SharpnessReport sharpness_family(const MarginalPolytope& pi,
                                        const ProbabilityVector& q,
                                        const RealVector& v,
                                        std::vector<double> epsilons) {
  if (q.size() != pi.r() || v.size() != pi.r())
    throw DimensionMismatch("sharpness_family: q and v must have length r");
  if (std::abs(v.sum()) > 1e-12)
    throw InfeasibleDirection("direction must sum to zero");
  detail::validate_ladder(epsilons);
  if (!contains(pi, q))
    throw InfeasibleDirection("base point q is not in the polytope");

  const auto& vertices = extreme_marginals(pi);
  std::vector<const ProbabilityVector*> q_star;
  double h_min = infinity;
  for (const auto& vert : vertices)
    h_min = std::min(h_min, shannon_entropy(vert));
  for (const auto& vert : vertices)
    if (shannon_entropy(vert) <= h_min + tol::tie) q_star.push_back(&vert);

  SharpnessReport report;
  report.epsilons = std::move(epsilons);
  for (double eps : report.epsilons) {
    std::optional<ProbabilityVector> p;
    try {
      p.emplace(RealVector(q.weights() + eps * v));
    } catch (const InvalidDistribution& e) {
      throw InfeasibleDirection("p_eps leaves the simplex at eps=" +
                                std::to_string(eps) + ": " + e.what());
    }
    if (!contains(pi, *p))
      throw InfeasibleDirection("p_eps leaves the polytope at eps=" +
                                std::to_string(eps));
    report.gaps.push_back(shannon_entropy(*p) - h_min);
    double d = infinity;
    for (const ProbabilityVector* qs : q_star)
      d = std::min(d, (p->weights() - qs->weights()).cwiseAbs().sum());
    report.distances.push_back(d);
  }
  report.fitted_exponent = detail::fit_exponent(report.distances, report.gaps);
  auto [deriv, divergent] = detail::directional_derivative(q, v);
  report.directional_derivative = deriv;
  report.derivative_divergent = divergent;
  return report;
}

// Quantum lift of the classical family: rho_eps = oplus p_eps(i) sigma_i
// with fixed pure sigma_i, requiring every conditional set to be Full.
// The entropy variation is then purely classical; both identities
//   S(rho_eps) - S_min = H(p_eps) - H_min
//   || rho_eps - sigma ||_1 = || p_eps - q ||_1
// are checked to 1e-9 and a NumericalError is raised on failure.
inline SharpnessReport quantum_sharpness_family(
    const BlockConvexSet& c, const MinimizerDescription& md,
    const ProbabilityVector& q, const RealVector& v,
    std::vector<double> epsilons) {
  for (const auto& set : c.conditionals())
    if (set.kind() != ConditionalSet::Kind::Full)
      throw std::invalid_argument(
          "quantum_sharpness_family requires all-Full conditional sets");
  if (q.size() != c.block_count() || v.size() != c.block_count())
    throw DimensionMismatch("q and v must have length r");
  if (std::abs(v.sum()) > 1e-12)
    throw InfeasibleDirection("direction must sum to zero");
  detail::validate_ladder(epsilons);
  if (!contains(c.marginal(), q))
    throw InfeasibleDirection("base point q is not in the polytope");

  const int r = c.block_count();
  std::vector<DensityMatrix> pure_blocks;
  pure_blocks.reserve(r);
  for (int i = 0; i < r; ++i)
    pure_blocks.push_back(
        DensityMatrix::basis_state(c.decomposition().block_dim(i)));

  auto family_member = [&](const ProbabilityVector& p) {
    std::vector<std::optional<DensityMatrix>> conds(r);
    for (int i = 0; i < r; ++i)
      if (p[i] > 0.0) conds[i] = pure_blocks[i];
    return BlockState(c.decomposition(), p, std::move(conds));
  };
  const BlockState sigma_ref = family_member(q);

  SharpnessReport report;
  report.epsilons = std::move(epsilons);
  for (double eps : report.epsilons) {
    std::optional<ProbabilityVector> p;
    try {
      p.emplace(RealVector(q.weights() + eps * v));
    } catch (const InvalidDistribution& e) {
      throw InfeasibleDirection("p_eps leaves the simplex at eps=" +
                                std::to_string(eps) + ": " + e.what());
    }
    if (!contains(c.marginal(), *p))
      throw InfeasibleDirection("p_eps leaves the polytope at eps=" +
                                std::to_string(eps));
    const BlockState rho = family_member(*p);
    const double gap = entropy_of_blockstate(rho) - md.s_min;
    const double classical_gap = shannon_entropy(*p) - md.s_min;
    if (std::abs(gap - classical_gap) > 1e-9)
      throw NumericalError("quantum gap deviates from the classical gap");
    const double lifted = blockwise_trace_distance(rho, sigma_ref);
    const double classical_dist =
        (p->weights() - q.weights()).cwiseAbs().sum();
    if (std::abs(lifted - classical_dist) > 1e-9)
      throw NumericalError(
          "lifted trace distance deviates from the marginal distance");
    report.gaps.push_back(gap);
    report.distances.push_back(distance_to_minimizers(c, rho, md).distance);
  }
  report.fitted_exponent = detail::fit_exponent(report.distances, report.gaps);
  auto [deriv, divergent] = detail::directional_derivative(q, v);
  report.directional_derivative = deriv;
  report.derivative_divergent = divergent;
  return report;
}

// Spectral blocks of a Hermitian observable: eigenvalues are clustered
// greedily in ascending order, a gap above cluster_tol starting a new
// block. Block dimensions are the cluster multiplicities and the basis
// columns are the matching eigenvectors.
struct SpectralBlocks {
  BlockDecomposition decomposition;
  Matrix basis;
  std::vector<double> cluster_energies;  // mean eigenvalue per cluster
};

inline SpectralBlocks gibbs_from_observable(const HermitianMatrix& h0,
                                            double cluster_tol) {
  if (cluster_tol < 0.0)
    throw std::invalid_argument("cluster_tol must be nonnegative");
  const Spectrum s = eigh(h0);
  const int d = h0.dim();

  // eigh sorts descending; walk it backwards for ascending energies.
  Matrix basis(d, d);
  RealVector energy(d);
  for (int k = 0; k < d; ++k) {
    energy[k] = s.eigenvalues[d - 1 - k];
    basis.col(k) = s.eigenvectors.col(d - 1 - k);
  }

  std::vector<int> dims;
  std::vector<double> means;
  int start = 0;
  for (int k = 1; k <= d; ++k) {
    if (k == d || energy[k] - energy[k - 1] > cluster_tol) {
      dims.push_back(k - start);
      means.push_back(energy.segment(start, k - start).mean());
      start = k;
    }
  }
  return {BlockDecomposition(std::move(dims)), std::move(basis),
          std::move(means)};
}

// Verification in the Gibbs setting: singleton marginal {q} with Full
// conditionals. For uniform q the explicit constant 1/(2r) is tested;
// otherwise the Pinsker-route constant 1/4.
inline StabilityReport gibbs_verify(const BlockDecomposition& decomp,
                                    const ProbabilityVector& q,
                                    std::int64_t n_samples,
                                    std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const int r = decomp.block_count();
  if (q.size() != r)
    throw DimensionMismatch("gibbs_verify: q length != block count");
  for (int i = 0; i < r; ++i)
    if (q[i] <= 0.0)
      throw InvalidDistribution("gibbs_verify: q must be strictly positive");

  std::vector<ConditionalSet> conds(static_cast<size_t>(r),
                                    ConditionalSet::full());
  const BlockConvexSet c(decomp, MarginalPolytope::singleton(q),
                         std::move(conds));
  const MinimizerDescription md = minimize_entropy(c);

  bool uniform = true;
  for (int i = 0; i < r; ++i)
    if (std::abs(q[i] - 1.0 / r) > tol::norm) uniform = false;
  const double constant = uniform ? 1.0 / (2.0 * r) : 0.25;

  return detail::run_verification(c, md, std::nullopt, constant, n_samples,
                                  seed);
}

}  // namespace entrostab
