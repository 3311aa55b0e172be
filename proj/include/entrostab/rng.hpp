#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace entrostab {

// splitmix64 finalizer; also used to hash (seed, stream, index) triples.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent sub-seed for a (tag, index) slot of a run.
// Every random quantity in the library is keyed this way, so sample k of
// a run is a pure function of (seed, tag, k) and loops may be evaluated
// in any order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index = 0) {
  return mix64(mix64(seed ^ mix64(tag)) + index);
}

// Counter-based generator: a splitmix64 stream keyed by a single 64-bit
// seed. Distribution transforms are implemented inline (Box-Muller,
// exponential) so outputs are identical on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(mix64(seed)) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(derive_seed(seed, stream)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe under log().
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller.
  double gaussian() {
    const double u = uniform_pos();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
  }

  // Complex Gaussian with independent N(0,1) real and imaginary parts.
  std::complex<double> gaussian_complex() {
    const double u = uniform_pos();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    return {r * std::cos(2.0 * std::numbers::pi * v),
            r * std::sin(2.0 * std::numbers::pi * v)};
  }

  // Flat Dirichlet over k coordinates (normalized exponentials).
  Eigen::VectorXd dirichlet(int k) {
    Eigen::VectorXd g(k);
    for (int i = 0; i < k; ++i) g[i] = -std::log(uniform_pos());
    return g / g.sum();
  }

  Eigen::MatrixXcd ginibre(int rows, int cols) {
    Eigen::MatrixXcd g(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) g(i, j) = gaussian_complex();
    return g;
  }

  // Haar-random pure state vector.
  Eigen::VectorXcd pure_state(int dim) {
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gaussian_complex();
    return v / v.norm();
  }

  // Haar-random unitary: QR of a Ginibre matrix with the phases of the
  // R diagonal folded into Q (Mezzadri's recipe).
  Eigen::MatrixXcd unitary(int dim) {
    Eigen::MatrixXcd g = ginibre(dim, dim);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
      std::complex<double> d = r(j, j);
      double a = std::abs(d);
      q.col(j) *= (a > 0) ? d / a : std::complex<double>(1, 0);
    }
    return q;
  }

 private:
  std::uint64_t state_;
};

}  // namespace entrostab
