#pragma once

#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "entrostab/fixtures.hpp"
#include "entrostab/stability.hpp"

// A compact, deterministic run of every module invariant, used by the
// CLI selftest subcommand. The acceptance suite under tests/ runs the
// same properties at larger sample counts.

namespace entrostab {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

namespace selftest_detail {

class Suite {
 public:
  explicit Suite(std::uint64_t seed) : seed_(seed) {}

  void check(const std::string& name, bool pass, const std::string& detail) {
    results_.push_back({name, pass, detail});
  }

  // Worst-case slack formulation: `slack` must stay >= -tolerance.
  void check_slack(const std::string& name, double min_slack,
                   double tolerance) {
    std::ostringstream os;
    os << "min slack " << min_slack << " (tolerance " << -tolerance << ")";
    check(name, min_slack >= -tolerance, os.str());
  }

  std::uint64_t seed() const { return seed_; }
  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::uint64_t seed_;
  std::vector<CheckResult> results_;
};

inline void core_checks(Suite& s) {
  // S(rho) >= -log Tr(rho^2)
  double purity_slack = infinity;
  for (int dim : {2, 3, 4, 8}) {
    for (int k = 0; k < 1000; ++k) {
      CounterRng rng(derive_seed(s.seed(), 0xA1, dim * 10000 + k));
      const DensityMatrix rho = random_density_matrix(dim, rng);
      purity_slack = std::min(
          purity_slack, von_neumann_entropy(rho) + std::log(purity(rho)));
    }
  }
  s.check_slack("entropy-purity bound", purity_slack, 1e-9);

  // D(rho||sigma) >= (1/2) ||rho - sigma||_1^2
  double pinsker_slack = infinity;
  for (int dim : {2, 4, 8}) {
    for (int k = 0; k < 1000; ++k) {
      CounterRng rng(derive_seed(s.seed(), 0xA2, dim * 10000 + k));
      const DensityMatrix rho = random_density_matrix(dim, rng);
      const DensityMatrix sigma = random_density_matrix(dim, rng);
      const double t = trace_distance(rho, sigma);
      pinsker_slack =
          std::min(pinsker_slack, relative_entropy(rho, sigma) - 0.5 * t * t);
    }
  }
  s.check_slack("Pinsker inequality", pinsker_slack, 1e-9);

  // |S(U rho U*) - S(rho)| <= 1e-8
  double unitary_dev = 0.0;
  for (int dim : {2, 4}) {
    for (int k = 0; k < 100; ++k) {
      CounterRng rng(derive_seed(s.seed(), 0xA3, dim * 10000 + k));
      const DensityMatrix rho = random_density_matrix(dim, rng);
      const Matrix u = rng.unitary(dim);
      const DensityMatrix rotated(Matrix(u * rho.matrix() * u.adjoint()));
      unitary_dev = std::max(unitary_dev,
                             std::abs(von_neumann_entropy(rotated) -
                                      von_neumann_entropy(rho)));
    }
  }
  {
    std::ostringstream os;
    os << "max deviation " << unitary_dev;
    s.check("entropy unitary invariance", unitary_dev <= 1e-8, os.str());
  }

  // max_i p_i >= exp(-H) and exp(-H)/r
  double mass_slack = infinity;
  for (int r = 2; r <= 8; ++r) {
    for (int k = 0; k < 250; ++k) {
      CounterRng rng(derive_seed(s.seed(), 0xA4, r * 10000 + k));
      const ProbabilityVector p(rng.dirichlet(r));
      const MaxMassBounds b = max_mass_bounds(p);
      const double top = p.weights().maxCoeff();
      mass_slack = std::min({mass_slack, top - b.lower_exp,
                             top - b.lower_refined});
    }
  }
  s.check_slack("max-mass lower bounds", mass_slack, 0.0);

  // trace distance: exact symmetry, triangle inequality
  bool symmetric = true;
  double triangle_slack = infinity;
  for (int k = 0; k < 200; ++k) {
    CounterRng rng(derive_seed(s.seed(), 0xA5, k));
    const int dim = 2 + static_cast<int>(rng.next_u64() % 3);
    const DensityMatrix a = random_density_matrix(dim, rng);
    const DensityMatrix b = random_density_matrix(dim, rng);
    const DensityMatrix c = random_density_matrix(dim, rng);
    if (trace_distance(a, b) != trace_distance(b, a)) symmetric = false;
    triangle_slack =
        std::min(triangle_slack, trace_distance(a, c) + trace_distance(c, b) -
                                     trace_distance(a, b));
  }
  s.check("trace distance symmetry (exact)", symmetric, "bitwise equality");
  s.check_slack("trace distance triangle inequality", triangle_slack, 1e-9);
}

inline BlockState random_blockstate(const BlockDecomposition& d,
                                    CounterRng& rng) {
  const int r = d.block_count();
  const ProbabilityVector w(rng.dirichlet(r));
  std::vector<std::optional<DensityMatrix>> conds(r);
  for (int i = 0; i < r; ++i)
    conds[i] = random_density_matrix(d.block_dim(i), rng);
  return BlockState(d, w, std::move(conds));
}

inline void block_checks(Suite& s) {
  const std::vector<std::vector<int>> decomps = {{2, 2}, {1, 3}, {2, 3, 2}};

  double decomposition_dev = 0.0;
  double additivity_dev = 0.0;
  double bound_slack = infinity;
  double roundtrip_dev = 0.0;
  for (const auto& dims : decomps) {
    const BlockDecomposition d(dims);
    for (int k = 0; k < 200; ++k) {
      CounterRng rng(derive_seed(s.seed(), 0xB1,
                                 static_cast<std::uint64_t>(dims.size()) *
                                         100000 + static_cast<std::uint64_t>(k)));
      const BlockState a = random_blockstate(d, rng);
      const BlockState b = random_blockstate(d, rng);
      decomposition_dev = std::max(
          decomposition_dev, std::abs(entropy_of_blockstate(a) -
                                      von_neumann_entropy(assemble(a))));
      additivity_dev = std::max(
          additivity_dev, std::abs(blockwise_trace_distance(a, b) -
                                   trace_distance(assemble(a), assemble(b))));
      const BoundCheck bc = blockwise_bound_check(a, b);
      bound_slack = std::min(bound_slack, bc.rhs - bc.lhs);
      const BlockState back = decompose(assemble(a), d);
      roundtrip_dev = std::max(
          roundtrip_dev,
          blockwise_trace_distance(a, back));
    }
  }
  {
    std::ostringstream os;
    os << "max deviation " << decomposition_dev;
    s.check("entropy decomposition identity", decomposition_dev <= 1e-8,
            os.str());
  }
  {
    std::ostringstream os;
    os << "max deviation " << additivity_dev;
    s.check("blockwise trace-norm additivity", additivity_dev <= 1e-9,
            os.str());
  }
  s.check_slack("blockwise trace inequality", bound_slack, 1e-9);
  {
    std::ostringstream os;
    os << "max deviation " << roundtrip_dev;
    s.check("decompose/assemble round trip", roundtrip_dev <= tol::recon,
            os.str());
  }
}

inline void constraint_checks(Suite& s) {
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(2, 2), fixtures::mixed_hull()};

  bool members_ok = true;
  bool mixtures_ok = true;
  for (size_t f = 0; f < sets.size(); ++f) {
    for (int k = 0; k < 200; ++k) {
      const BlockState a =
          sample_member(sets[f], derive_seed(s.seed(), 0xC1, f * 100000 + k));
      const BlockState b = sample_member(
          sets[f], derive_seed(s.seed(), 0xC2, f * 100000 + k));
      if (!member_check(sets[f], a)) members_ok = false;
      for (double lambda : {0.25, 0.5, 0.75}) {
        const BlockState m =
            decompose(assemble(mix(a, b, lambda)), a.decomposition());
        if (!member_check(sets[f], m)) mixtures_ok = false;
      }
    }
  }
  s.check("sampled members pass member_check", members_ok, "all samples");
  s.check("convexity: mixtures stay members", mixtures_ok,
          "lambda in {0.25, 0.5, 0.75}");

  bool irredundant = true;
  for (const auto& set : sets) {
    const auto& vs = extreme_marginals(set.marginal());
    if (vs.size() < 2) continue;
    for (size_t i = 0; i < vs.size(); ++i) {
      std::vector<ProbabilityVector> others;
      for (size_t j = 0; j < vs.size(); ++j)
        if (j != i) others.push_back(vs[j]);
      if (contains(MarginalPolytope(set.marginal().r(), others), vs[i]))
        irredundant = false;
    }
  }
  s.check("vertex lists are irredundant", irredundant,
          "no vertex inside the hull of the others");
}

inline void minimizer_checks(Suite& s) {
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(2, 2), fixtures::gibbs_uniform(3, 2),
      fixtures::mixed_hull()};

  double minimality_slack = infinity;
  double sigma_entropy_dev = 0.0;
  bool sigma_members = true;
  double minimizer_distance = 0.0;
  bool sigma_majorizes = true;
  for (size_t f = 0; f < sets.size(); ++f) {
    const MinimizerDescription md = minimize_entropy(sets[f]);
    for (int k = 0; k < 200; ++k) {
      const BlockState bs =
          sample_member(sets[f], derive_seed(s.seed(), 0xD1, f * 100000 + k));
      minimality_slack =
          std::min(minimality_slack, entropy_of_blockstate(bs) - md.s_min);
      const DistanceResult dr = distance_to_minimizers(sets[f], bs, md);
      sigma_entropy_dev =
          std::max(sigma_entropy_dev,
                   std::abs(entropy_of_blockstate(dr.nearest) - md.s_min));
      if (!member_check(sets[f], dr.nearest)) sigma_members = false;
      const MajorizationReport mr = majorization_report(bs, dr.nearest);
      if (!mr.sigma_majorizes_rho) sigma_majorizes = false;
      if (k < 20)
        minimizer_distance = std::max(
            minimizer_distance,
            distance_to_minimizers(sets[f], dr.nearest, md).distance);
    }
  }
  s.check_slack("entropy minimality over samples", minimality_slack, 1e-9);
  {
    std::ostringstream os;
    os << "max deviation " << sigma_entropy_dev;
    s.check("nearest minimizer attains s_min", sigma_entropy_dev <= 1e-8,
            os.str());
  }
  s.check("nearest minimizer passes member_check", sigma_members, "all");
  {
    std::ostringstream os;
    os << "max distance " << minimizer_distance;
    s.check("distance at a minimizer is zero", minimizer_distance <= 1e-9,
            os.str());
  }
  s.check("minimizer spectrum majorizes member spectrum", sigma_majorizes,
          "Schur-consistent direction on all fixtures");
}

inline void stability_checks(Suite& s) {
  // zero violations on compact runs of the shipped fixture shapes
  std::int64_t total_violations = 0;
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(2, 2), fixtures::gibbs_uniform(3, 2),
      fixtures::mixed_hull()};
  for (size_t f = 0; f < sets.size(); ++f)
    total_violations +=
        verify_stability(sets[f], 1000, derive_seed(s.seed(), 0xE1, f))
            .violations;
  {
    std::ostringstream os;
    os << total_violations << " violations";
    s.check("stability inequality on fixtures", total_violations == 0,
            os.str());
  }

  // explicit 1/(2r) constant in the uniform Gibbs setting
  std::int64_t gibbs_violations = 0;
  for (int r : {2, 3}) {
    std::vector<int> dims(static_cast<size_t>(r), 2);
    gibbs_violations += gibbs_verify(BlockDecomposition(dims),
                                     ProbabilityVector::uniform(r), 1000,
                                     derive_seed(s.seed(), 0xE2,
                                                 static_cast<std::uint64_t>(r)))
                            .violations;
  }
  {
    std::ostringstream os;
    os << gibbs_violations << " violations";
    s.check("uniform Gibbs 1/(2r) constant", gibbs_violations == 0, os.str());
  }

  // sharpness: linear scaling with a nonzero directional derivative, and
  // the quantum lift reproducing the classical data
  const BlockConvexSet segment_quantum = [] {
    std::vector<ProbabilityVector> vertices{
        ProbabilityVector(std::vector<double>{0.2, 0.8}),
        ProbabilityVector(std::vector<double>{0.8, 0.2})};
    return BlockConvexSet(
        BlockDecomposition({2, 2}), MarginalPolytope(2, std::move(vertices)),
        {ConditionalSet::full(), ConditionalSet::full()});
  }();
  const ProbabilityVector q(std::vector<double>{0.2, 0.8});
  RealVector v(2);
  v << 1.0, -1.0;
  const std::vector<double> ladder = {3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  const SharpnessReport classical =
      sharpness_family(segment_quantum.marginal(), q, v, ladder);
  const MinimizerDescription md = minimize_entropy(segment_quantum);
  const SharpnessReport quantum =
      quantum_sharpness_family(segment_quantum, md, q, v, ladder);
  {
    std::ostringstream os;
    os << "classical " << classical.fitted_exponent << ", quantum "
       << quantum.fitted_exponent << ", derivative "
       << classical.directional_derivative;
    const bool ok =
        !classical.derivative_divergent &&
        std::abs(classical.directional_derivative) > 1e-6 &&
        classical.fitted_exponent >= 0.9 && classical.fitted_exponent <= 1.1 &&
        std::abs(classical.fitted_exponent - quantum.fitted_exponent) <= 0.01;
    s.check("sharpness exponent dichotomy", ok, os.str());
  }
  {
    double dev = 0.0;
    for (size_t k = 0; k < ladder.size(); ++k) {
      dev = std::max(dev, std::abs(classical.gaps[k] - quantum.gaps[k]));
      dev = std::max(dev,
                     std::abs(classical.distances[k] - quantum.distances[k]));
    }
    std::ostringstream os;
    os << "max deviation " << dev;
    s.check("quantum lift reproduces classical data", dev <= 1e-9, os.str());
  }

  // nested-sample monotonicity of the c1 estimate
  {
    const MarginalPolytope pi = MarginalPolytope::simplex(2);
    const MinimizerDescription cmd =
        minimize_entropy(fixtures::classical_simplex2());
    const auto small = estimate_c1(pi, cmd.minimizing_marginals, 1000,
                                   derive_seed(s.seed(), 0xE3));
    const auto large = estimate_c1(pi, cmd.minimizing_marginals, 10000,
                                   derive_seed(s.seed(), 0xE3));
    std::ostringstream os;
    os << "estimate(1e3) = " << *small << ", estimate(1e4) = " << *large;
    s.check("c1 estimate monotone under sample growth",
            *large <= *small + 1e-12, os.str());
  }
}

}  // namespace selftest_detail

inline std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  selftest_detail::Suite suite(seed);
  selftest_detail::core_checks(suite);
  selftest_detail::block_checks(suite);
  selftest_detail::constraint_checks(suite);
  selftest_detail::minimizer_checks(suite);
  selftest_detail::stability_checks(suite);
  return suite.take();
}

}  // namespace entrostab
