#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "holosim/errors.hpp"

namespace holosim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double hermitian = 1e-10;    // relative to max(1, max |H_ij|)
inline constexpr double norm = 1e-12;
inline constexpr double degeneracy = 1e-9;    // relative to the spectral radius
inline constexpr double rank = 1e-12;         // relative to the largest singular value
inline constexpr double overlap = 1e-8;
inline constexpr double subspace_overlap = 1e-6;
inline constexpr double closure = 1e-12;
}  // namespace tol

// Principal value in (-pi, pi].
double wrap_angle(double angle);

// Unit-norm pure state. Construction normalizes; zero vectors are rejected.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes);

  Index dim() const noexcept { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](Index i) const { return amplitudes_(i); }

  // <this|other>
  Complex overlap(const StateVector& other) const;
  StateVector rephased(double alpha) const;

 private:
  ComplexVector amplitudes_;
};

// Contiguous run of eigenvalue indices (ascending order) treated as one subspace.
struct BandBlock {
  Index first = 0;
  Index count = 1;

  Index end() const noexcept { return first + count; }
  bool operator==(const BandBlock&) const = default;
};

struct EigenDecomposition {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // orthonormal columns

  double spectral_radius() const;
  // Columns of one block, as a dim x count frame.
  ComplexMatrix block(const BandBlock& b) const;
  // Groups eigenvalues whose consecutive gaps fall below tolerance * spectral radius.
  std::vector<BandBlock> clusters(double relative_tolerance = tol::degeneracy) const;
};

double max_entry_norm(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);

// Hermitian eigensolver. Eigenvalues ascend; each eigenvector is rephased so that
// its largest-magnitude component (lowest index on ties) is real and positive.
// Vectors inside a degenerate cluster are only meaningful as a frame.
EigenDecomposition eigh(const ComplexMatrix& h);

// Polar factor of a square, full-rank matrix: the closest unitary in any
// unitarily invariant norm.
ComplexMatrix nearest_unitary(const ComplexMatrix& m, double rank_tolerance = tol::rank);

// max_ij |(M^dagger M - I)_ij|
double unitarity_defect(const ComplexMatrix& m);

// exp(-i H dt) for Hermitian H, built from the spectral decomposition so the
// result is unitary to rounding.
ComplexMatrix unitary_exponential(const ComplexMatrix& h, double dt);

}  // namespace holosim
