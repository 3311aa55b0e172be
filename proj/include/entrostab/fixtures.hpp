#pragma once

#include <vector>

#include "entrostab/constraint.hpp"

// Canonical constraint sets used by the self-test and the shipped
// fixture files. Kept in code so the verification suite runs without
// touching the filesystem; the JSON fixtures mirror these exactly.

namespace entrostab::fixtures {

// Two classical outcomes, free marginal: blocks (1,1), Pi = simplex.
inline BlockConvexSet classical_simplex2() {
  return BlockConvexSet(
      BlockDecomposition({1, 1}), MarginalPolytope::simplex(2),
      {ConditionalSet::full(), ConditionalSet::full()});
}

// Classical segment polytope hull{(0.2,0.8),(0.8,0.2)}, blocks (1,1).
inline BlockConvexSet classical_segment() {
  std::vector<ProbabilityVector> vertices{
      ProbabilityVector(std::vector<double>{0.2, 0.8}),
      ProbabilityVector(std::vector<double>{0.8, 0.2})};
  return BlockConvexSet(
      BlockDecomposition({1, 1}), MarginalPolytope(2, std::move(vertices)),
      {ConditionalSet::full(), ConditionalSet::full()});
}

// Gibbs setting: singleton uniform marginal over r blocks of equal
// dimension, Full conditionals.
inline BlockConvexSet gibbs_uniform(int r, int block_dim) {
  std::vector<int> dims(static_cast<size_t>(r), block_dim);
  std::vector<ConditionalSet> conds(static_cast<size_t>(r),
                                    ConditionalSet::full());
  return BlockConvexSet(BlockDecomposition(std::move(dims)),
                        MarginalPolytope::singleton(
                            ProbabilityVector::uniform(r)),
                        std::move(conds));
}

// Mixed conditional kinds: segment marginal hull{(0.3,0.7),(0.7,0.3)},
// block 0 constrained to hull{|0><0|, I/2}, block 1 free.
inline BlockConvexSet mixed_hull() {
  std::vector<ProbabilityVector> vertices{
      ProbabilityVector(std::vector<double>{0.3, 0.7}),
      ProbabilityVector(std::vector<double>{0.7, 0.3})};
  std::vector<DensityMatrix> generators{DensityMatrix::basis_state(2),
                                        DensityMatrix::maximally_mixed(2)};
  return BlockConvexSet(
      BlockDecomposition({2, 2}), MarginalPolytope(2, std::move(vertices)),
      {ConditionalSet::hull(std::move(generators)), ConditionalSet::full()});
}

}  // namespace entrostab::fixtures
