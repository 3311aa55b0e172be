#pragma once

// Numerical tolerances used throughout the library. Double-precision
// eigensolvers on dimensions up to 64 achieve all of these comfortably.

namespace entrostab::tol {

// Hermiticity: max |m(i,j) - conj(m(j,i))|.
inline constexpr double herm = 1e-9;

// Trace / probability normalization: |sum - 1|.
inline constexpr double norm = 1e-9;

// Positive semidefiniteness: eigenvalues in [-psd, 0) are clipped to 0
// before any logarithm, implementing 0 log 0 = 0 robustly.
inline constexpr double psd = 1e-9;

// Support detection for relative entropy: eigenvalues <= supp count as
// kernel directions.
inline constexpr double supp = 1e-10;

// Eigendecomposition reconstruction and orthonormality.
inline constexpr double recon = 1e-8;
inline constexpr double orth = 1e-8;

// Block-diagonality: max modulus of an off-block entry.
inline constexpr double off_block = 1e-9;

// Convex membership/feasibility: residual of the least-squares fit over
// convex weights.
inline constexpr double membership = 1e-7;

// Ties between entropy values of candidate minimizers (absolute).
inline constexpr double tie = 1e-9;

// Stability-inequality violation margin (absolute, on the gap side).
inline constexpr double violation = 1e-9;

// Block traces below this count as an empty (weight-zero) block.
inline constexpr double zero_weight = 1e-12;

// Samples closer than this to the minimizer set are skipped when
// accumulating gap/dist^2 ratio statistics.
inline constexpr double min_distance = 1e-8;

}  // namespace entrostab::tol
