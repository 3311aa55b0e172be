#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "entrostab/constraint.hpp"

namespace entrostab {

// Witness of a per-block entropy minimum: the achieving state, or no
// state for Full sets where any pure state attains entropy zero.
struct BlockWitness {
  ConditionalSet::Kind kind;
  std::optional<DensityMatrix> state;
  bool any_pure() const { return !state.has_value(); }
};

// Minimal entropy and minimizer over one conditional set. Entropy is
// concave, so over a hull the minimum sits at a generator.
inline std::pair<double, BlockWitness> conditional_min_entropy(
    const ConditionalSet& c, [[maybe_unused]] int dim) {
  switch (c.kind()) {
    case ConditionalSet::Kind::Full:
      return {0.0, {ConditionalSet::Kind::Full, std::nullopt}};
    case ConditionalSet::Kind::Singleton:
      return {von_neumann_entropy(c.state()),
              {ConditionalSet::Kind::Singleton, c.state()}};
    case ConditionalSet::Kind::Hull: {
      double best = infinity;
      const DensityMatrix* witness = nullptr;
      for (const auto& g : c.generators()) {
        const double s = von_neumann_entropy(g);
        if (s < best) {
          best = s;
          witness = &g;
        }
      }
      return {best, {ConditionalSet::Kind::Hull, *witness}};
    }
  }
  throw NumericalError("unreachable conditional kind");
}

// Full description of the entropy minimum over a block-convex set: the
// value, every extreme marginal attaining it (ties within tol::tie), and
// per-block minimal entropies with witnesses.
struct MinimizerDescription {
  double s_min;
  std::vector<ProbabilityVector> minimizing_marginals;
  std::vector<double> per_block_min_entropy;
  std::vector<BlockWitness> per_block_witnesses;
};

// S_min = min over extreme marginals q of H(q) + sum_i q_i m_i, where
// m_i is the entropy minimum of conditional set i.
inline MinimizerDescription minimize_entropy(const BlockConvexSet& c) {
  const int r = c.block_count();
  MinimizerDescription md;
  md.per_block_min_entropy.reserve(r);
  md.per_block_witnesses.reserve(r);
  for (int i = 0; i < r; ++i) {
    auto [value, witness] = conditional_min_entropy(
        c.conditional_set(i), c.decomposition().block_dim(i));
    md.per_block_min_entropy.push_back(value);
    md.per_block_witnesses.push_back(std::move(witness));
  }

  const auto& vertices = extreme_marginals(c.marginal());
  std::vector<double> values;
  values.reserve(vertices.size());
  double best = infinity;
  for (const auto& q : vertices) {
    double v = shannon_entropy(q);
    for (int i = 0; i < r; ++i) v += q[i] * md.per_block_min_entropy[i];
    values.push_back(v);
    best = std::min(best, v);
  }
  md.s_min = best;
  for (size_t k = 0; k < vertices.size(); ++k)
    if (values[k] <= best + tol::tie)
      md.minimizing_marginals.push_back(vertices[k]);
  return md;
}

// Rank-one projector onto the top eigenvector of rho_i, and the trace
// norm || p_i rho_i - q_i projector ||_1. In dimension 2 this projector
// is the optimal pure state (checked against a Bloch-sphere brute force);
// in higher dimensions it is the candidate optimum, making the reported
// distance an upper bound on the true one.
struct NearestPure {
  DensityMatrix projector;
  double distance;
};

inline NearestPure nearest_pure_block(const DensityMatrix& rho_i, double p_i,
                                      double q_i) {
  if (p_i < 0.0 || p_i > 1.0 + tol::norm || q_i < 0.0 || q_i > 1.0 + tol::norm)
    throw InvalidState("nearest_pure_block: weights must lie in [0, 1]");
  const Spectrum s = eigh(rho_i.hermitian());
  DensityMatrix projector = DensityMatrix::pure(s.eigenvectors.col(0));
  const double distance =
      hermitian_trace_norm(p_i * rho_i.matrix() - q_i * projector.matrix());
  return {std::move(projector), distance};
}

namespace detail {

// Generators of a hull tied (within tol::tie) with its entropy minimum.
// These are exactly the entropy minimizers inside the hull: a mixture of
// distinct states has strictly larger entropy, so nothing interior ties.
inline std::vector<const DensityMatrix*> tied_min_entropy_generators(
    const ConditionalSet& set, double min_entropy) {
  std::vector<const DensityMatrix*> tied;
  for (const auto& g : set.generators())
    if (von_neumann_entropy(g) <= min_entropy + tol::tie) tied.push_back(&g);
  return tied;
}

}  // namespace detail

// Distance from a member state to the minimizer set M, with the
// achieving sigma in M. M is scanned exactly: every minimizing marginal,
// and per block the nearest minimal-entropy conditional (top-eigenvector
// projector for Full, the fixed state for Singleton, the nearest tied
// generator for Hull).
struct DistanceResult {
  double distance;
  BlockState nearest;
};

inline DistanceResult distance_to_minimizers(const BlockConvexSet& c,
                                             const BlockState& bs,
                                             const MinimizerDescription& md) {
  if (!member_check(c, bs))
    throw NotAMember("distance_to_minimizers: state is not in the set");
  const int r = c.block_count();

  double best_total = infinity;
  std::optional<BlockState> best_sigma;

  for (const auto& q : md.minimizing_marginals) {
    double total = 0.0;
    std::vector<std::optional<DensityMatrix>> sigma_conds(r);
    for (int i = 0; i < r; ++i) {
      const double pi = bs.weight(i);
      const double qi = q[i];
      if (qi <= 0.0) {
        total += pi;  // || p_i rho_i - 0 ||_1
        continue;
      }
      const ConditionalSet& set = c.conditional_set(i);
      const int dim = c.decomposition().block_dim(i);
      switch (set.kind()) {
        case ConditionalSet::Kind::Full: {
          if (!bs.conditional(i)) {
            sigma_conds[i] = DensityMatrix::basis_state(dim);
            total += qi;
          } else {
            NearestPure np = nearest_pure_block(*bs.conditional(i), pi, qi);
            total += np.distance;
            sigma_conds[i] = std::move(np.projector);
          }
          break;
        }
        case ConditionalSet::Kind::Singleton: {
          sigma_conds[i] = set.state();
          total += detail::block_term_distance(pi, bs.conditional(i), qi,
                                               sigma_conds[i]);
          break;
        }
        case ConditionalSet::Kind::Hull: {
          const auto tied = detail::tied_min_entropy_generators(
              set, md.per_block_min_entropy[i]);
          double best_block = infinity;
          const DensityMatrix* best_gen = nullptr;
          for (const DensityMatrix* g : tied) {
            const double d = detail::block_term_distance(
                pi, bs.conditional(i), qi, std::optional<DensityMatrix>(*g));
            if (d < best_block) {
              best_block = d;
              best_gen = g;
            }
          }
          total += best_block;
          sigma_conds[i] = *best_gen;
          break;
        }
      }
    }
    if (total < best_total) {
      best_total = total;
      best_sigma = BlockState(c.decomposition(), q, std::move(sigma_conds));
    }
  }
  return {best_total, std::move(*best_sigma)};
}

// Spectrum of the assembled state, computed block by block (the blocks
// act on orthogonal subspaces, so the full spectrum is their union).
inline RealVector blockstate_spectrum(const BlockState& bs) {
  const BlockDecomposition& d = bs.decomposition();
  RealVector s = RealVector::Zero(d.total_dim());
  for (int i = 0; i < d.block_count(); ++i) {
    if (!bs.conditional(i)) continue;
    s.segment(d.offset(i), d.block_dim(i)) =
        bs.weight(i) * hermitian_eigenvalues(bs.conditional(i)->matrix());
  }
  return s;
}

// Majorization comparison between a member and a minimizer. The Schur
// order is partial, so both directions are reported; the worst prefix
// slack is negative exactly when that direction fails.
struct MajorizationReport {
  bool sigma_majorizes_rho;
  bool rho_majorizes_sigma;
  double min_slack_sigma_over_rho;
  double min_slack_rho_over_sigma;
};

inline MajorizationReport majorization_report(const BlockState& rho,
                                              const BlockState& sigma) {
  RealVector a = blockstate_spectrum(sigma);
  RealVector b = blockstate_spectrum(rho);
  std::sort(a.begin(), a.end(), std::greater<double>());
  std::sort(b.begin(), b.end(), std::greater<double>());
  double sa = 0.0, sb = 0.0;
  double slack_ab = infinity, slack_ba = infinity;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    sa += a[k];
    sb += b[k];
    slack_ab = std::min(slack_ab, sa - sb);
    slack_ba = std::min(slack_ba, sb - sa);
  }
  return {slack_ab >= -1e-9, slack_ba >= -1e-9, slack_ab, slack_ba};
}

}  // namespace entrostab
