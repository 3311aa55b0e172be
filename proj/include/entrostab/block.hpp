#pragma once

#include <numeric>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "entrostab/core_math.hpp"

namespace entrostab {

// Orthogonal direct-sum splitting of the Hilbert space, realized as
// contiguous index ranges of a fixed ordered basis.
class BlockDecomposition {
 public:
  explicit BlockDecomposition(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
      throw InvalidBlockState("decomposition needs at least one block");
    offsets_.reserve(dims_.size());
    int off = 0;
    for (int d : dims_) {
      if (d < 1) throw InvalidBlockState("block dimensions must be >= 1");
      offsets_.push_back(off);
      off += d;
    }
    total_ = off;
  }

  int block_count() const { return static_cast<int>(dims_.size()); }
  int block_dim(int i) const { return dims_[i]; }
  int offset(int i) const { return offsets_[i]; }
  int total_dim() const { return total_; }
  const std::vector<int>& block_dims() const { return dims_; }

  bool operator==(const BlockDecomposition& o) const {
    return dims_ == o.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// A block-diagonal state in the form oplus_i p_i rho_i: marginal weights
// plus per-block conditional states. A conditional is absent exactly
// when its weight is zero.
class BlockState {
 public:
  BlockState(BlockDecomposition decomposition, ProbabilityVector weights,
             std::vector<std::optional<DensityMatrix>> conditionals)
      : decomposition_(std::move(decomposition)),
        weights_(std::move(weights)),
        conditionals_(std::move(conditionals)) {
    const int r = decomposition_.block_count();
    if (weights_.size() != r ||
        static_cast<int>(conditionals_.size()) != r)
      throw InvalidBlockState("weights/conditionals length must equal r");
    for (int i = 0; i < r; ++i) {
      const bool present = conditionals_[i].has_value();
      if (present != (weights_[i] > 0.0)) {
        std::ostringstream os;
        os << "block " << i << ": conditional must be present exactly when "
           << "the weight is nonzero (weight = " << weights_[i] << ")";
        throw InvalidBlockState(os.str());
      }
      if (present && conditionals_[i]->dim() != decomposition_.block_dim(i)) {
        std::ostringstream os;
        os << "block " << i << ": conditional has dim "
           << conditionals_[i]->dim() << ", expected "
           << decomposition_.block_dim(i);
        throw InvalidBlockState(os.str());
      }
    }
  }

  const BlockDecomposition& decomposition() const { return decomposition_; }
  const ProbabilityVector& weights() const { return weights_; }
  double weight(int i) const { return weights_[i]; }
  const std::optional<DensityMatrix>& conditional(int i) const {
    return conditionals_[i];
  }
  int block_count() const { return decomposition_.block_count(); }

 private:
  BlockDecomposition decomposition_;
  ProbabilityVector weights_;
  std::vector<std::optional<DensityMatrix>> conditionals_;
};

inline bool is_block_diagonal(const DensityMatrix& rho,
                              const BlockDecomposition& d) {
  if (rho.dim() != d.total_dim())
    throw DimensionMismatch("is_block_diagonal: state dim != decomposition");
  const Matrix& m = rho.matrix();
  for (int a = 0; a < d.block_count(); ++a)
    for (int b = 0; b < d.block_count(); ++b) {
      if (a == b) continue;
      const auto blk = m.block(d.offset(a), d.offset(b), d.block_dim(a),
                               d.block_dim(b));
      if (blk.cwiseAbs().maxCoeff() > tol::off_block) return false;
    }
  return true;
}

// Splits a block-diagonal state into marginal weights p_i = Tr(P_i rho)
// and renormalized conditionals P_i rho P_i / p_i. Blocks with trace
// below tol::zero_weight come out as weight zero with no conditional.
inline BlockState decompose(const DensityMatrix& rho,
                            const BlockDecomposition& d) {
  if (!is_block_diagonal(rho, d))
    throw NotBlockDiagonal("decompose: state is not block-diagonal");
  const int r = d.block_count();
  RealVector w(r);
  std::vector<std::optional<DensityMatrix>> conds(r);
  for (int i = 0; i < r; ++i) {
    Matrix blk = rho.matrix().block(d.offset(i), d.offset(i), d.block_dim(i),
                                    d.block_dim(i));
    const double t = blk.trace().real();
    if (t <= tol::zero_weight) {
      w[i] = 0.0;
      continue;
    }
    w[i] = t;
    conds[i] = DensityMatrix(Matrix(blk / t));
  }
  return BlockState(d, ProbabilityVector(w), std::move(conds));
}

// Inverse of decompose: lays out p_i rho_i on the diagonal, zero-weight
// blocks filled with zero matrices.
inline DensityMatrix assemble(const BlockState& bs) {
  const BlockDecomposition& d = bs.decomposition();
  Matrix m = Matrix::Zero(d.total_dim(), d.total_dim());
  for (int i = 0; i < d.block_count(); ++i) {
    if (!bs.conditional(i)) continue;
    m.block(d.offset(i), d.offset(i), d.block_dim(i), d.block_dim(i)) =
        bs.weight(i) * bs.conditional(i)->matrix();
  }
  return DensityMatrix(std::move(m));
}

// S(rho) = H(p) + sum_i p_i S(rho_i), skipping absent blocks.
inline double entropy_of_blockstate(const BlockState& bs) {
  double s = shannon_entropy(bs.weights());
  for (int i = 0; i < bs.block_count(); ++i)
    if (bs.conditional(i))
      s += bs.weight(i) * von_neumann_entropy(*bs.conditional(i));
  return s;
}

namespace detail {
// || w_a rho_a - w_b rho_b ||_1 for one block, treating an absent
// conditional as the zero matrix.
inline double block_term_distance(double wa,
                                  const std::optional<DensityMatrix>& a,
                                  double wb,
                                  const std::optional<DensityMatrix>& b) {
  if (!a && !b) return 0.0;
  if (!a) return wb;
  if (!b) return wa;
  return hermitian_trace_norm(wa * a->matrix() - wb * b->matrix());
}

inline void require_same_decomposition(const BlockState& a,
                                       const BlockState& b) {
  if (!(a.decomposition() == b.decomposition()))
    throw DecompositionMismatch("block states use different decompositions");
}
}  // namespace detail

// ||a - b||_1 computed block by block; the trace norm is additive over
// orthogonal direct sums, so this equals the assembled trace distance.
inline double blockwise_trace_distance(const BlockState& a,
                                       const BlockState& b) {
  detail::require_same_decomposition(a, b);
  double s = 0.0;
  for (int i = 0; i < a.block_count(); ++i)
    s += detail::block_term_distance(a.weight(i), a.conditional(i),
                                     b.weight(i), b.conditional(i));
  return s;
}

// Both sides of the blockwise trace inequality
//   ||rho - sigma||_1^2 <= 2 ||p - q||_1^2 + 2 sum_i p_i ||rho_i - sigma_i||_1^2.
// When one side of a block is absent, the missing conditional counts as
// equal to the present one (its internal distance term is zero); the
// weight difference still contributes through ||p - q||_1.
struct BoundCheck {
  double lhs;
  double rhs;
};

inline BoundCheck blockwise_bound_check(const BlockState& a,
                                        const BlockState& b) {
  detail::require_same_decomposition(a, b);
  const double full = blockwise_trace_distance(a, b);
  const double marginal =
      (a.weights().weights() - b.weights().weights()).cwiseAbs().sum();
  double conditional = 0.0;
  for (int i = 0; i < a.block_count(); ++i) {
    if (!a.conditional(i) || !b.conditional(i)) continue;
    const double di = hermitian_trace_norm(a.conditional(i)->matrix() -
                                           b.conditional(i)->matrix());
    conditional += a.weight(i) * di * di;
  }
  return {full * full, 2.0 * marginal * marginal + 2.0 * conditional};
}

// Convex mixture lambda * a + (1 - lambda) * b, carried out blockwise so
// no precision is lost assembling and re-splitting.
inline BlockState mix(const BlockState& a, const BlockState& b,
                      double lambda) {
  detail::require_same_decomposition(a, b);
  const int r = a.block_count();
  RealVector w(r);
  std::vector<std::optional<DensityMatrix>> conds(r);
  for (int i = 0; i < r; ++i) {
    const double wa = lambda * a.weight(i);
    const double wb = (1.0 - lambda) * b.weight(i);
    w[i] = wa + wb;
    if (w[i] <= 0.0) {
      w[i] = 0.0;
      continue;
    }
    Matrix m = Matrix::Zero(a.decomposition().block_dim(i),
                            a.decomposition().block_dim(i));
    if (a.conditional(i)) m += wa * a.conditional(i)->matrix();
    if (b.conditional(i)) m += wb * b.conditional(i)->matrix();
    conds[i] = DensityMatrix(Matrix(m / w[i]));
  }
  return BlockState(a.decomposition(), ProbabilityVector(w), std::move(conds));
}

}  // namespace entrostab
