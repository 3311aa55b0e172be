#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "entrostab/fixtures.hpp"
#include "entrostab/minimizer.hpp"

using namespace entrostab;
using Catch::Approx;

namespace {
constexpr double kLog2 = 0.6931471805599453;
constexpr double kLog3 = 1.0986122886681098;
constexpr double kH37 = 0.6108643020548935;  // H(0.3, 0.7)

// Closed-form trace norm of a 2x2 Hermitian matrix; independent of the
// library's eigensolver route.
double trace_norm_2x2(const Matrix& m) {
  const double a = m(0, 0).real();
  const double c = m(1, 1).real();
  const double mean = 0.5 * (a + c);
  const double disc =
      std::sqrt(0.25 * (a - c) * (a - c) + std::norm(m(0, 1)));
  return std::abs(mean + disc) + std::abs(mean - disc);
}

DensityMatrix bloch_pure(double theta, double phi) {
  Eigen::VectorXcd v(2);
  v << Complex(std::cos(theta / 2), 0),
      std::exp(Complex(0, phi)) * std::sin(theta / 2);
  return DensityMatrix::pure(v);
}

// Brute-force best pure state at the given angular resolution (degrees):
// min over the Bloch sphere of || p rho - q psi psi* ||_1.
double bloch_grid_min(const DensityMatrix& rho, double p, double q,
                      double resolution_deg) {
  const double step = resolution_deg * std::numbers::pi / 180.0;
  double best = infinity;
  for (double theta = 0.0; theta <= std::numbers::pi + 1e-12; theta += step)
    for (double phi = 0.0; phi < 2 * std::numbers::pi; phi += step) {
      const Matrix diff =
          p * rho.matrix() - q * bloch_pure(theta, phi).matrix();
      best = std::min(best, trace_norm_2x2(diff));
    }
  return best;
}
}  // namespace

TEST_CASE("conditional entropy minima", "[minimizer]") {
  const auto [full_value, full_witness] =
      conditional_min_entropy(ConditionalSet::full(), 3);
  REQUIRE(full_value == 0.0);
  REQUIRE(full_witness.any_pure());

  const auto [single_value, single_witness] = conditional_min_entropy(
      ConditionalSet::singleton(DensityMatrix::maximally_mixed(2)), 2);
  REQUIRE(single_value == Approx(kLog2).margin(1e-12));
  REQUIRE_FALSE(single_witness.any_pure());

  const auto [hull_value, hull_witness] = conditional_min_entropy(
      ConditionalSet::hull(
          {DensityMatrix::basis_state(2), DensityMatrix::maximally_mixed(2)}),
      2);
  REQUIRE(hull_value == 0.0);
  REQUIRE(hull_witness.state->matrix()(0, 0).real() == Approx(1.0));
}

TEST_CASE("entropy minimum over block-convex sets", "[minimizer]") {
  // singleton marginal, Full conditionals: s_min = H(q)
  const BlockConvexSet gibbs_q(
      BlockDecomposition({2, 2}),
      MarginalPolytope::singleton(ProbabilityVector({0.3, 0.7})),
      {ConditionalSet::full(), ConditionalSet::full()});
  REQUIRE(minimize_entropy(gibbs_q).s_min == Approx(kH37).margin(1e-12));

  // full simplex, Full conditionals: s_min = 0, every vertex minimizes
  const BlockConvexSet free3(
      BlockDecomposition({2, 2, 2}), MarginalPolytope::simplex(3),
      {ConditionalSet::full(), ConditionalSet::full(), ConditionalSet::full()});
  const MinimizerDescription md3 = minimize_entropy(free3);
  REQUIRE(md3.s_min == Approx(0.0).margin(1e-12));
  REQUIRE(md3.minimizing_marginals.size() == 3);

  // uniform singleton over three blocks: s_min = log 3
  const MinimizerDescription uniform3 =
      minimize_entropy(fixtures::gibbs_uniform(3, 2));
  REQUIRE(std::abs(uniform3.s_min - kLog3) <= 1e-12);

  // mixed hull fixture: both segment endpoints tie
  const MinimizerDescription mixed = minimize_entropy(fixtures::mixed_hull());
  REQUIRE(mixed.s_min == Approx(kH37).margin(1e-12));
  REQUIRE(mixed.minimizing_marginals.size() == 2);
  REQUIRE(mixed.per_block_min_entropy[0] == 0.0);
  REQUIRE(mixed.per_block_min_entropy[1] == 0.0);
}

TEST_CASE("minimizer description internal consistency", "[minimizer]") {
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(2, 2), fixtures::mixed_hull()};
  for (const auto& set : sets) {
    const MinimizerDescription md = minimize_entropy(set);
    for (const auto& q : md.minimizing_marginals) {
      double v = shannon_entropy(q);
      for (int i = 0; i < set.block_count(); ++i)
        v += q[i] * md.per_block_min_entropy[i];
      REQUIRE(v == Approx(md.s_min).margin(1e-9));
    }
  }
}

TEST_CASE("nearest pure state within a block", "[minimizer]") {
  CounterRng rng(211);
  const DensityMatrix psi = DensityMatrix::pure(rng.pure_state(2));
  REQUIRE(nearest_pure_block(psi, 0.5, 0.5).distance ==
          Approx(0.0).margin(1e-9));

  // diag(0.9, 0.1): distance 2*delta to the top-eigenvector projector;
  // a 1-degree Bloch-sphere sweep confirms that projector is optimal
  const DensityMatrix tilted =
      DensityMatrix::diagonal((RealVector(2) << 0.9, 0.1).finished());
  const NearestPure np = nearest_pure_block(tilted, 1.0, 1.0);
  REQUIRE(np.distance == Approx(0.2).margin(1e-12));
  REQUIRE(np.projector.matrix()(0, 0).real() == Approx(1.0).margin(1e-12));
  REQUIRE(bloch_grid_min(tilted, 1.0, 1.0, 1.0) ==
          Approx(np.distance).margin(1e-3));

  // maximally mixed: every pure state ties at distance 1
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  REQUIRE(nearest_pure_block(mixed, 1.0, 1.0).distance ==
          Approx(1.0).margin(1e-12));
  REQUIRE(bloch_grid_min(mixed, 1.0, 1.0, 1.0) == Approx(1.0).margin(1e-3));
}

TEST_CASE("distance to the minimizer set", "[minimizer]") {
  // a minimizer has distance zero
  const BlockConvexSet gibbs2 = fixtures::gibbs_uniform(2, 2);
  const MinimizerDescription md2 = minimize_entropy(gibbs2);
  CounterRng rng(223);
  std::vector<std::optional<DensityMatrix>> pure_conds{
      DensityMatrix::pure(rng.pure_state(2)),
      DensityMatrix::pure(rng.pure_state(2))};
  const BlockState minimizer(gibbs2.decomposition(),
                             ProbabilityVector::uniform(2),
                             std::move(pure_conds));
  REQUIRE(distance_to_minimizers(gibbs2, minimizer, md2).distance <= 1e-9);

  // one block perturbed to diag(0.9, 0.1): distance q_1 * 2 delta = 0.1
  std::vector<std::optional<DensityMatrix>> perturbed{
      DensityMatrix::diagonal((RealVector(2) << 0.9, 0.1).finished()),
      DensityMatrix::basis_state(2)};
  const BlockState near(gibbs2.decomposition(), ProbabilityVector::uniform(2),
                        std::move(perturbed));
  const DistanceResult dr = distance_to_minimizers(gibbs2, near, md2);
  REQUIRE(dr.distance == Approx(0.1).margin(1e-12));
  REQUIRE(entropy_of_blockstate(dr.nearest) == Approx(kLog2).margin(1e-8));

  // classical free marginal at the barycenter: both vertices tie at 1
  const BlockConvexSet classical = fixtures::classical_simplex2();
  const MinimizerDescription mdc = minimize_entropy(classical);
  const Matrix scalar = Matrix::Identity(1, 1);
  std::vector<std::optional<DensityMatrix>> scalars{DensityMatrix(scalar),
                                                    DensityMatrix(scalar)};
  const BlockState center(classical.decomposition(),
                          ProbabilityVector::uniform(2), std::move(scalars));
  REQUIRE(distance_to_minimizers(classical, center, mdc).distance ==
          Approx(1.0).margin(1e-12));

  // non-members are rejected (marginal outside the segment polytope)
  std::vector<std::optional<DensityMatrix>> off{DensityMatrix(scalar),
                                                DensityMatrix(scalar)};
  const BlockState outside(classical.decomposition(),
                           ProbabilityVector({0.05, 0.95}), std::move(off));
  const BlockConvexSet segment = fixtures::classical_segment();
  REQUIRE_THROWS_AS(
      distance_to_minimizers(segment, outside, minimize_entropy(segment)),
      NotAMember);
}

TEST_CASE("distance handles absent blocks against supported marginals",
          "[minimizer]") {
  // free marginal over two 2-dimensional blocks; a member sitting at the
  // vertex e1 has no second block, yet the evaluation against the tied
  // minimizing marginal e2 must still price that block at q2
  const BlockConvexSet set(BlockDecomposition({2, 2}),
                           MarginalPolytope::simplex(2),
                           {ConditionalSet::full(), ConditionalSet::full()});
  const MinimizerDescription md = minimize_entropy(set);
  REQUIRE(md.minimizing_marginals.size() == 2);

  std::vector<std::optional<DensityMatrix>> conds{
      DensityMatrix::maximally_mixed(2), std::nullopt};
  const BlockState at_vertex(set.decomposition(), ProbabilityVector({1.0, 0.0}),
                             std::move(conds));
  const DistanceResult dr = distance_to_minimizers(set, at_vertex, md);
  // nearest q = e1: only the first block's impurity contributes
  REQUIRE(dr.distance == Approx(1.0).margin(1e-12));
  REQUIRE(dr.nearest.weights()[0] == Approx(1.0));
  REQUIRE_FALSE(dr.nearest.conditional(1).has_value());
  // the e2 alternative would cost p1 + q2 = 2, strictly worse
  REQUIRE(entropy_of_blockstate(dr.nearest) == Approx(0.0).margin(1e-12));
}

TEST_CASE("returned minimizers attain s_min and stay members",
          "[minimizer]") {
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(2, 2), fixtures::gibbs_uniform(3, 2),
      fixtures::mixed_hull()};
  for (size_t f = 0; f < sets.size(); ++f) {
    const MinimizerDescription md = minimize_entropy(sets[f]);
    for (int k = 0; k < 100; ++k) {
      const BlockState bs =
          sample_member(sets[f], derive_seed(227, f, static_cast<std::uint64_t>(k)));
      REQUIRE(entropy_of_blockstate(bs) >= md.s_min - 1e-9);
      const DistanceResult dr = distance_to_minimizers(sets[f], bs, md);
      REQUIRE(std::abs(entropy_of_blockstate(dr.nearest) - md.s_min) <= 1e-8);
      REQUIRE(member_check(sets[f], dr.nearest));
      REQUIRE(distance_to_minimizers(sets[f], dr.nearest, md).distance <=
              1e-9);
    }
  }
}

TEST_CASE("hull blocks pick the nearest tied pure generator",
          "[minimizer]") {
  // two tied entropy-zero generators: |0><0| and |+><+|
  Eigen::VectorXcd plus(2);
  plus << Complex(std::numbers::sqrt2 / 2, 0),
      Complex(std::numbers::sqrt2 / 2, 0);
  const DensityMatrix g0 = DensityMatrix::basis_state(2);
  const DensityMatrix g1 = DensityMatrix::pure(plus);
  const BlockConvexSet set(
      BlockDecomposition({2}),
      MarginalPolytope::singleton(ProbabilityVector({1.0})),
      {ConditionalSet::hull({g0, g1})});
  const MinimizerDescription md = minimize_entropy(set);
  REQUIRE(md.s_min == 0.0);

  // a member close to |+><+| must be matched with that generator
  std::vector<std::optional<DensityMatrix>> conds{
      DensityMatrix(Matrix(0.9 * g1.matrix() + 0.1 * g0.matrix()))};
  const BlockState near_plus(set.decomposition(), ProbabilityVector({1.0}),
                             std::move(conds));
  const DistanceResult dr = distance_to_minimizers(set, near_plus, md);
  REQUIRE((dr.nearest.conditional(0)->matrix() - g1.matrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  REQUIRE(dr.distance <
          hermitian_trace_norm(near_plus.conditional(0)->matrix() -
                               g0.matrix()));
}

TEST_CASE("grid-search oracle matches the implementation", "[minimizer]") {
  // r <= 3, block dims <= 2 fixtures; 2-degree pure-state grids
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(2, 2), fixtures::mixed_hull()};
  for (size_t f = 0; f < sets.size(); ++f) {
    const MinimizerDescription md = minimize_entropy(sets[f]);
    for (int k = 0; k < 10; ++k) {
      const BlockState bs =
          sample_member(sets[f], derive_seed(229, f, static_cast<std::uint64_t>(k)));
      const double impl = distance_to_minimizers(sets[f], bs, md).distance;

      double oracle = infinity;
      for (const auto& q : md.minimizing_marginals) {
        double total = 0.0;
        for (int i = 0; i < sets[f].block_count(); ++i) {
          const double pi = bs.weight(i);
          const double qi = q[i];
          const int dim = sets[f].decomposition().block_dim(i);
          const ConditionalSet& cset = sets[f].conditional_set(i);
          if (qi <= 0.0) {
            total += pi;
          } else if (cset.kind() == ConditionalSet::Kind::Full) {
            // dim 1 has a unique pure state; an absent block costs qi
            if (dim == 1 || !bs.conditional(i))
              total += std::abs(pi - qi);
            else
              total += bloch_grid_min(*bs.conditional(i), pi, qi, 2.0);
          } else {  // Hull: enumerate the tied minimal-entropy generators
            double best = infinity;
            for (const auto& g : cset.generators()) {
              if (von_neumann_entropy(g) > md.per_block_min_entropy[i] + tol::tie)
                continue;
              best = std::min(best, hermitian_trace_norm(
                                        pi * bs.conditional(i)->matrix() -
                                        qi * g.matrix()));
            }
            total += best;
          }
        }
        oracle = std::min(oracle, total);
      }
      REQUIRE(std::abs(impl - oracle) <= 2e-2);
      REQUIRE(impl <= oracle + 1e-9);  // grid restriction can only overshoot
    }
  }
}

TEST_CASE("majorization checker on members and minimizers", "[minimizer]") {
  const std::vector<BlockConvexSet> sets = {
      fixtures::classical_simplex2(), fixtures::classical_segment(),
      fixtures::gibbs_uniform(2, 2), fixtures::mixed_hull()};
  for (size_t f = 0; f < sets.size(); ++f) {
    const MinimizerDescription md = minimize_entropy(sets[f]);
    for (int k = 0; k < 100; ++k) {
      const BlockState bs =
          sample_member(sets[f], derive_seed(233, f, static_cast<std::uint64_t>(k)));
      const DistanceResult dr = distance_to_minimizers(sets[f], bs, md);
      const MajorizationReport mr = majorization_report(bs, dr.nearest);
      REQUIRE(mr.sigma_majorizes_rho);
      REQUIRE(mr.min_slack_sigma_over_rho >= -1e-9);
    }
  }
}

TEST_CASE("majorization checker reports incomparable spectra",
          "[minimizer]") {
  // hull{(0.5,0.5,0), (0.6,0.2,0.2)}: the entropy minimizer is the first
  // vertex, yet neither spectrum majorizes the other
  const BlockConvexSet set(
      BlockDecomposition({1, 1, 1}),
      MarginalPolytope(3, {ProbabilityVector({0.5, 0.5, 0.0}),
                           ProbabilityVector({0.6, 0.2, 0.2})}),
      {ConditionalSet::full(), ConditionalSet::full(), ConditionalSet::full()});
  const MinimizerDescription md = minimize_entropy(set);
  REQUIRE(md.minimizing_marginals.size() == 1);
  REQUIRE(md.minimizing_marginals[0][0] == Approx(0.5));

  const Matrix scalar = Matrix::Identity(1, 1);
  std::vector<std::optional<DensityMatrix>> conds{
      DensityMatrix(scalar), DensityMatrix(scalar), DensityMatrix(scalar)};
  const BlockState member(set.decomposition(),
                          ProbabilityVector({0.6, 0.2, 0.2}),
                          std::move(conds));
  const DistanceResult dr = distance_to_minimizers(set, member, md);
  const MajorizationReport mr = majorization_report(member, dr.nearest);
  REQUIRE_FALSE(mr.sigma_majorizes_rho);
  REQUIRE_FALSE(mr.rho_majorizes_sigma);
  REQUIRE(mr.min_slack_sigma_over_rho < -1e-6);
  REQUIRE(mr.min_slack_rho_over_sigma < -1e-6);
}
