#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "entrostab/errors.hpp"
#include "entrostab/rng.hpp"
#include "entrostab/tolerances.hpp"

namespace entrostab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// x log x with the 0 log 0 = 0 convention; inputs in [-tol::psd, 0) are
// clipped to 0 first.
inline double xlogx(double x) {
  if (x <= 0.0) return 0.0;
  return x * std::log(x);
}

// A probability distribution: nonnegative weights summing to one.
// Entries in [-tol::psd, 0) are clipped to zero at construction.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(RealVector weights) : w_(std::move(weights)) {
    if (w_.size() < 1)
      throw InvalidDistribution("probability vector must have length >= 1");
    for (Eigen::Index i = 0; i < w_.size(); ++i) {
      if (w_[i] < -tol::psd) {
        std::ostringstream os;
        os << "weight " << i << " is negative: " << w_[i];
        throw InvalidDistribution(os.str());
      }
      if (w_[i] < 0.0) w_[i] = 0.0;
    }
    const double s = w_.sum();
    if (std::abs(s - 1.0) > tol::norm) {
      std::ostringstream os;
      os << "weights sum to " << s << " (expected 1 within " << tol::norm
         << ")";
      throw InvalidDistribution(os.str());
    }
  }

  explicit ProbabilityVector(const std::vector<double>& weights)
      : ProbabilityVector(
            Eigen::Map<const RealVector>(weights.data(),
                                         static_cast<Eigen::Index>(weights.size()))) {}

  ProbabilityVector(std::initializer_list<double> weights)
      : ProbabilityVector(std::vector<double>(weights)) {}

  static ProbabilityVector uniform(int r) {
    return ProbabilityVector(RealVector::Constant(r, 1.0 / r));
  }

  static ProbabilityVector point_mass(int r, int i) {
    RealVector w = RealVector::Zero(r);
    w[i] = 1.0;
    return ProbabilityVector(w);
  }

  int size() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[i]; }
  const RealVector& weights() const { return w_; }

  bool operator==(const ProbabilityVector& o) const { return w_ == o.w_; }

 private:
  RealVector w_;
};

// Square complex matrix validated to be Hermitian within tol::herm.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw NonHermitianInput("matrix is not square");
    const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol::herm) {
      std::ostringstream os;
      os << "matrix deviates from Hermitian by " << dev;
      throw NonHermitianInput(os.str());
    }
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& entries() const { return m_; }

 private:
  Matrix m_;
};

// Eigendecomposition carrier: eigenvalues sorted descending with the
// matching orthonormal eigenvector columns.
struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

inline Spectrum eigh(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.entries());
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed to converge");
  const int d = m.dim();
  Spectrum s;
  s.eigenvalues = es.eigenvalues().reverse();
  s.eigenvectors = Matrix(d, d);
  for (int k = 0; k < d; ++k)
    s.eigenvectors.col(k) = es.eigenvectors().col(d - 1 - k);
  return s;
}

// Eigenvalues only (descending) of a Hermitian matrix given raw entries.
inline RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed to converge");
  return es.eigenvalues().reverse();
}

// Trace norm of a Hermitian matrix: sum of absolute eigenvalues.
inline double hermitian_trace_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0).real());
  return hermitian_eigenvalues(m).cwiseAbs().sum();
}

// Quantum state: positive semidefinite Hermitian matrix with unit trace.
class DensityMatrix {
 public:
  explicit DensityMatrix(HermitianMatrix m) : m_(std::move(m)) { validate(); }
  explicit DensityMatrix(Matrix m) : m_(HermitianMatrix(std::move(m))) {
    validate();
  }

  static DensityMatrix pure(const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd v = psi / psi.norm();
    return DensityMatrix(Matrix(v * v.adjoint()));
  }

  static DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix(Matrix(Matrix::Identity(dim, dim) / double(dim)));
  }

  static DensityMatrix diagonal(const RealVector& probs) {
    Matrix m = Matrix::Zero(probs.size(), probs.size());
    for (Eigen::Index i = 0; i < probs.size(); ++i) m(i, i) = probs[i];
    return DensityMatrix(m);
  }

  // Basis state |i><i| in the given dimension.
  static DensityMatrix basis_state(int dim, int i = 0) {
    Matrix m = Matrix::Zero(dim, dim);
    m(i, i) = 1.0;
    return DensityMatrix(m);
  }

  int dim() const { return m_.dim(); }
  const Matrix& matrix() const { return m_.entries(); }
  const HermitianMatrix& hermitian() const { return m_; }

 private:
  void validate() const {
    const Complex tr = m_.entries().trace();
    if (std::abs(tr.real() - 1.0) > tol::norm ||
        std::abs(tr.imag()) > tol::norm) {
      std::ostringstream os;
      os << "trace is " << tr.real() << " (expected 1 within " << tol::norm
         << ")";
      throw InvalidState(os.str());
    }
    const RealVector ev = hermitian_eigenvalues(m_.entries());
    if (ev[ev.size() - 1] < -tol::psd) {
      std::ostringstream os;
      os << "matrix has negative eigenvalue " << ev[ev.size() - 1];
      throw InvalidState(os.str());
    }
  }

  HermitianMatrix m_;
};

// Random state from the Ginibre ensemble: G G* / Tr(G G*).
inline DensityMatrix random_density_matrix(int dim, CounterRng& rng) {
  Matrix g = rng.ginibre(dim, dim);
  Matrix m = g * g.adjoint();
  return DensityMatrix(Matrix(m / m.trace().real()));
}

// Shannon entropy in nats: -sum p_i log p_i. Result clamped to >= 0.
inline double shannon_entropy(const ProbabilityVector& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) h -= xlogx(p[i]);
  return std::max(0.0, h);
}

// Von Neumann entropy in nats: Shannon entropy of the spectrum, with
// eigenvalues in [-tol::psd, 0) clipped to zero before the logarithm.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  if (rho.dim() == 1) return 0.0;
  const RealVector ev = hermitian_eigenvalues(rho.matrix());
  double h = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) h -= xlogx(ev[i]);
  return std::max(0.0, h);
}

// Quantum relative entropy D(rho || sigma) in nats; +infinity when the
// support of rho is not contained in the support of sigma (detected via
// the tol::supp eigenvalue threshold).
inline double relative_entropy(const DensityMatrix& rho,
                               const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("relative_entropy: states have different dims");
  const Spectrum ss = eigh(sigma.hermitian());

  double tr_rho_log_sigma = 0.0;
  double kernel_mass = 0.0;
  for (int l = 0; l < sigma.dim(); ++l) {
    const double mu = ss.eigenvalues[l];
    const double occupancy =
        (ss.eigenvectors.col(l).adjoint() * rho.matrix() *
         ss.eigenvectors.col(l))(0, 0)
            .real();
    if (mu <= tol::supp)
      kernel_mass += occupancy;
    else
      tr_rho_log_sigma += occupancy * std::log(mu);
  }
  if (kernel_mass > tol::supp) return infinity;

  const RealVector rv = hermitian_eigenvalues(rho.matrix());
  double tr_rho_log_rho = 0.0;
  for (Eigen::Index k = 0; k < rv.size(); ++k) tr_rho_log_rho += xlogx(rv[k]);

  return std::max(0.0, tr_rho_log_rho - tr_rho_log_sigma);
}

namespace detail {
// Deterministic lexicographic order on matrix coefficients, used to fix
// the operand order inside trace_distance.
inline bool lex_less(const Matrix& a, const Matrix& b) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Complex x = a(i, j), y = b(i, j);
      if (x.real() != y.real()) return x.real() < y.real();
      if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
  return false;
}
}  // namespace detail

// Trace distance ||a - b||_1 in [0, 2]. The operand order is
// canonicalized so that trace_distance(a, b) and trace_distance(b, a)
// are bit-identical.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("trace_distance: states have different dims");
  const Matrix* x = &a.matrix();
  const Matrix* y = &b.matrix();
  if (detail::lex_less(*y, *x)) std::swap(x, y);
  return hermitian_trace_norm(*x - *y);
}

// Purity Tr(rho^2); for a Hermitian matrix this is the squared Frobenius
// norm of the entries.
inline double purity(const DensityMatrix& rho) {
  return rho.matrix().squaredNorm();
}

inline double effective_dimension(const DensityMatrix& rho) {
  return 1.0 / purity(rho);
}

// Analytic lower bounds on max_i p_i: exp(-H(p)) and exp(-H(p))/r.
struct MaxMassBounds {
  double lower_exp;
  double lower_refined;
};

inline MaxMassBounds max_mass_bounds(const ProbabilityVector& p) {
  const double h = shannon_entropy(p);
  const double e = std::exp(-h);
  return {e, e / p.size()};
}

// True iff a majorizes b: descending partial sums of a dominate those of
// b within slack tol at every prefix.
inline bool majorizes(RealVector a, RealVector b, double tolerance = 1e-9) {
  if (a.size() != b.size())
    throw DimensionMismatch("majorizes: vectors have different lengths");
  std::sort(a.begin(), a.end(), std::greater<double>());
  std::sort(b.begin(), b.end(), std::greater<double>());
  double sa = 0.0, sb = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    sa += a[k];
    sb += b[k];
    if (sa < sb - tolerance) return false;
  }
  return true;
}

}  // namespace entrostab
