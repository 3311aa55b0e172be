#pragma once

#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "entrostab/block.hpp"
#include "entrostab/core_math.hpp"
#include "entrostab/rng.hpp"

namespace entrostab {

namespace detail {

// Lawson-Hanson active-set NNLS: minimize ||A x - b||_2 subject to x >= 0.
// Problems here are tiny (a handful of vertices or hull generators), so
// the plain algorithm with a dense QR per inner solve is plenty.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd residual = b;
  const double grad_tol =
      1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());

  auto solve_passive = [&](const std::vector<bool>& mask) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (mask[j]) idx.push_back(j);
    Eigen::MatrixXd Ap(A.rows(), idx.size());
    for (size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
    Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[k];
    return z;
  };

  const int max_outer = 3 * n + 30;
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::VectorXd w = A.transpose() * residual;
    int best = -1;
    double best_w = grad_tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;

    for (int inner = 0; inner < max_outer; ++inner) {
      Eigen::VectorXd z = solve_passive(passive);
      double min_z = infinity;
      for (int j = 0; j < n; ++j)
        if (passive[j]) min_z = std::min(min_z, z[j]);
      if (min_z > 0.0) {
        x = z;
        break;
      }
      double alpha = infinity;
      for (int j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0)
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j)
        if (passive[j] && x[j] <= 1e-14) {
          x[j] = 0.0;
          passive[j] = false;
        }
    }
    residual = b - A * x;
  }
  return x;
}

}  // namespace detail

// Least-squares fit of a target by a convex combination of the given
// columns; the unit-sum constraint is appended as an extra row and the
// reported residual is over the augmented system.
struct ConvexFit {
  Eigen::VectorXd weights;
  double residual;
};

inline ConvexFit convex_fit(const Eigen::MatrixXd& columns,
                            const Eigen::VectorXd& target) {
  const int m = static_cast<int>(columns.rows());
  const int n = static_cast<int>(columns.cols());
  Eigen::MatrixXd A(m + 1, n);
  A.topRows(m) = columns;
  A.bottomRows(1).setOnes();
  Eigen::VectorXd b(m + 1);
  b.head(m) = target;
  b[m] = 1.0;
  Eigen::VectorXd x = detail::nnls(A, b);
  return {x, (A * x - b).norm()};
}

// Marginal polytope in V-representation: an irredundant vertex list
// inside the probability simplex. Redundant vertices (convex
// combinations of the others) are eliminated at construction.
class MarginalPolytope {
 public:
  MarginalPolytope(int r, std::vector<ProbabilityVector> vertices)
      : r_(r), vertices_(std::move(vertices)) {
    if (vertices_.empty())
      throw InvalidDistribution("polytope needs at least one vertex");
    for (const auto& v : vertices_)
      if (v.size() != r_)
        throw DimensionMismatch("polytope vertex has wrong length");
    prune_redundant();
  }

  static MarginalPolytope simplex(int r) {
    std::vector<ProbabilityVector> vs;
    vs.reserve(r);
    for (int i = 0; i < r; ++i)
      vs.push_back(ProbabilityVector::point_mass(r, i));
    return MarginalPolytope(r, std::move(vs));
  }

  static MarginalPolytope singleton(ProbabilityVector q) {
    const int r = q.size();
    return MarginalPolytope(r, {std::move(q)});
  }

  int r() const { return r_; }
  const std::vector<ProbabilityVector>& vertices() const { return vertices_; }
  bool is_singleton() const { return vertices_.size() == 1; }

 private:
  // Removing a redundant vertex never changes the hull, so a single pass
  // testing each vertex against all the others is enough.
  void prune_redundant() {
    for (size_t i = 0; i < vertices_.size();) {
      if (vertices_.size() == 1) break;
      Eigen::MatrixXd others(r_, vertices_.size() - 1);
      int col = 0;
      for (size_t j = 0; j < vertices_.size(); ++j)
        if (j != i) others.col(col++) = vertices_[j].weights();
      const ConvexFit fit = convex_fit(others, vertices_[i].weights());
      if (fit.residual <= tol::membership)
        vertices_.erase(vertices_.begin() + static_cast<std::ptrdiff_t>(i));
      else
        ++i;
    }
  }

  int r_;
  std::vector<ProbabilityVector> vertices_;
};

inline const std::vector<ProbabilityVector>& extreme_marginals(
    const MarginalPolytope& pi) {
  return pi.vertices();
}

inline bool contains(const MarginalPolytope& pi, const ProbabilityVector& p) {
  if (p.size() != pi.r())
    throw DimensionMismatch("contains: point has wrong length");
  Eigen::MatrixXd cols(pi.r(), pi.vertices().size());
  for (size_t j = 0; j < pi.vertices().size(); ++j)
    cols.col(static_cast<Eigen::Index>(j)) = pi.vertices()[j].weights();
  return convex_fit(cols, p.weights()).residual <= tol::membership;
}

// Seed tags: every random draw in the library is keyed by
// (seed, tag, index) so runs are reproducible and order-independent.
namespace seed_tag {
inline constexpr std::uint64_t marginal = 0x11;
inline constexpr std::uint64_t conditional = 0x22;
inline constexpr std::uint64_t sample = 0x33;
inline constexpr std::uint64_t stress = 0x44;
inline constexpr std::uint64_t c1 = 0x55;
}  // namespace seed_tag

// Draws a vertex mixture with flat Dirichlet weights. This is not
// uniform over the polytope volume; verification only needs coverage.
inline ProbabilityVector sample_marginal(const MarginalPolytope& pi,
                                         std::uint64_t seed) {
  if (pi.is_singleton()) return pi.vertices()[0];
  CounterRng rng(seed, seed_tag::marginal);
  const Eigen::VectorXd w = rng.dirichlet(static_cast<int>(pi.vertices().size()));
  RealVector p = RealVector::Zero(pi.r());
  for (size_t j = 0; j < pi.vertices().size(); ++j)
    p += w[static_cast<Eigen::Index>(j)] * pi.vertices()[j].weights();
  return ProbabilityVector(p);
}

// Per-block conditional constraint set: the full state space, a single
// fixed state, or the convex hull of finitely many generator states.
class ConditionalSet {
 public:
  enum class Kind { Full, Singleton, Hull };

  static ConditionalSet full() { return ConditionalSet(Kind::Full, {}); }

  static ConditionalSet singleton(DensityMatrix state) {
    return ConditionalSet(Kind::Singleton, {std::move(state)});
  }

  static ConditionalSet hull(std::vector<DensityMatrix> generators) {
    if (generators.empty())
      throw InvalidState("hull conditional set needs at least one generator");
    for (const auto& g : generators)
      if (g.dim() != generators[0].dim())
        throw DimensionMismatch("hull generators have mixed dimensions");
    return ConditionalSet(Kind::Hull, std::move(generators));
  }

  Kind kind() const { return kind_; }

  const DensityMatrix& state() const { return members_[0]; }

  const std::vector<DensityMatrix>& generators() const { return members_; }

  // Dimension pinned by the member states; -1 for Full (any dimension).
  int dim() const { return members_.empty() ? -1 : members_[0].dim(); }

 private:
  ConditionalSet(Kind k, std::vector<DensityMatrix> m)
      : kind_(k), members_(std::move(m)) {}

  Kind kind_;
  std::vector<DensityMatrix> members_;
};

inline DensityMatrix sample_conditional(const ConditionalSet& c, int dim,
                                        std::uint64_t seed) {
  CounterRng rng(seed, seed_tag::conditional);
  switch (c.kind()) {
    case ConditionalSet::Kind::Full:
      return random_density_matrix(dim, rng);
    case ConditionalSet::Kind::Singleton:
      return c.state();
    case ConditionalSet::Kind::Hull: {
      const auto& gens = c.generators();
      if (gens.size() == 1) return gens[0];
      const Eigen::VectorXd w = rng.dirichlet(static_cast<int>(gens.size()));
      Matrix m = Matrix::Zero(dim, dim);
      for (size_t k = 0; k < gens.size(); ++k)
        m += w[static_cast<Eigen::Index>(k)] * gens[k].matrix();
      return DensityMatrix(std::move(m));
    }
  }
  throw NumericalError("unreachable conditional kind");
}

// Block-convex constraint set: marginal polytope plus per-block
// conditional sets.
class BlockConvexSet {
 public:
  BlockConvexSet(BlockDecomposition decomposition, MarginalPolytope marginal,
                 std::vector<ConditionalSet> conditionals)
      : decomposition_(std::move(decomposition)),
        marginal_(std::move(marginal)),
        conditionals_(std::move(conditionals)) {
    const int r = decomposition_.block_count();
    if (marginal_.r() != r)
      throw DimensionMismatch("marginal polytope length != block count");
    if (static_cast<int>(conditionals_.size()) != r)
      throw DimensionMismatch("conditional set count != block count");
    for (int i = 0; i < r; ++i) {
      const int cd = conditionals_[i].dim();
      if (cd != -1 && cd != decomposition_.block_dim(i)) {
        std::ostringstream os;
        os << "conditional set " << i << " has dim " << cd << ", expected "
           << decomposition_.block_dim(i);
        throw DimensionMismatch(os.str());
      }
    }
  }

  const BlockDecomposition& decomposition() const { return decomposition_; }
  const MarginalPolytope& marginal() const { return marginal_; }
  const std::vector<ConditionalSet>& conditionals() const {
    return conditionals_;
  }
  const ConditionalSet& conditional_set(int i) const {
    return conditionals_[i];
  }
  int block_count() const { return decomposition_.block_count(); }

 private:
  BlockDecomposition decomposition_;
  MarginalPolytope marginal_;
  std::vector<ConditionalSet> conditionals_;
};

inline BlockState sample_member(const BlockConvexSet& c, std::uint64_t seed) {
  const ProbabilityVector p =
      sample_marginal(c.marginal(), derive_seed(seed, seed_tag::marginal));
  const int r = c.block_count();
  std::vector<std::optional<DensityMatrix>> conds(r);
  for (int i = 0; i < r; ++i) {
    if (p[i] <= 0.0) continue;
    conds[i] = sample_conditional(
        c.conditional_set(i), c.decomposition().block_dim(i),
        derive_seed(seed, seed_tag::conditional, static_cast<std::uint64_t>(i)));
  }
  return BlockState(c.decomposition(), p, std::move(conds));
}

namespace detail {
// Hull membership for a state: least-squares residual of the best convex
// combination of the generators, with real and imaginary parts stacked.
inline double hull_fit_residual(const std::vector<DensityMatrix>& gens,
                                const DensityMatrix& target) {
  const int d = target.dim();
  const int rows = 2 * d * d;
  Eigen::MatrixXd cols(rows, gens.size());
  auto flatten = [d](const Matrix& m, Eigen::Ref<Eigen::VectorXd> out) {
    int k = 0;
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        out[k++] = m(i, j).real();
        out[k++] = m(i, j).imag();
      }
  };
  for (size_t g = 0; g < gens.size(); ++g) {
    Eigen::VectorXd col(rows);
    flatten(gens[g].matrix(), col);
    cols.col(static_cast<Eigen::Index>(g)) = col;
  }
  Eigen::VectorXd t(rows);
  flatten(target.matrix(), t);
  return convex_fit(cols, t).residual;
}
}  // namespace detail

inline bool member_check(const BlockConvexSet& c, const BlockState& bs) {
  if (!(bs.decomposition() == c.decomposition()))
    throw DecompositionMismatch("member_check: decomposition differs");
  if (!contains(c.marginal(), bs.weights())) return false;
  for (int i = 0; i < c.block_count(); ++i) {
    if (!bs.conditional(i)) continue;
    const ConditionalSet& set = c.conditional_set(i);
    switch (set.kind()) {
      case ConditionalSet::Kind::Full:
        break;
      case ConditionalSet::Kind::Singleton:
        if (trace_distance(*bs.conditional(i), set.state()) > tol::membership)
          return false;
        break;
      case ConditionalSet::Kind::Hull:
        if (detail::hull_fit_residual(set.generators(), *bs.conditional(i)) >
            tol::membership)
          return false;
        break;
    }
  }
  return true;
}

}  // namespace entrostab
