#include "holosim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace holosim {

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const double n = amplitudes_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("state vector has zero or non-finite norm");
  amplitudes_ /= n;
}

Complex StateVector::overlap(const StateVector& other) const {
  if (other.dim() != dim()) throw Error("overlap of states with different dimensions");
  return amplitudes_.dot(other.amplitudes_);  // Eigen's dot conjugates the left operand
}

StateVector StateVector::rephased(double alpha) const {
  StateVector out = *this;
  out.amplitudes_ *= std::polar(1.0, alpha);
  return out;
}

double EigenDecomposition::spectral_radius() const {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

ComplexMatrix EigenDecomposition::block(const BandBlock& b) const {
  if (b.first < 0 || b.count < 1 || b.end() > eigenvalues.size())
    throw Error("band block outside the spectrum");
  return eigenvectors.middleCols(b.first, b.count);
}

std::vector<BandBlock> EigenDecomposition::clusters(double relative_tolerance) const {
  std::vector<BandBlock> out;
  const double gap_tol = relative_tolerance * spectral_radius();
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    if (!out.empty() && eigenvalues(i) - eigenvalues(i - 1) <= gap_tol)
      ++out.back().count;
    else
      out.push_back({i, 1});
  }
  return out;
}

double max_entry_norm(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error("hermiticity of a non-square matrix");
  return max_entry_norm(m - m.adjoint());
}

EigenDecomposition eigh(const ComplexMatrix& h) {
  if (h.rows() != h.cols() || h.rows() < 1) throw Error("eigh requires a non-empty square matrix");
  const double defect = hermiticity_defect(h);
  if (defect > tol::hermitian * std::max(1.0, max_entry_norm(h))) {
    std::ostringstream msg;
    msg << "eigh: matrix is not Hermitian (defect " << defect << ")";
    throw HermiticityError(msg.str(), defect);
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("eigh: eigensolver did not converge");

  EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Index k = 0; k < out.eigenvectors.cols(); ++k) {
    auto v = out.eigenvectors.col(k);
    const double largest = v.cwiseAbs().maxCoeff();
    Index pivot = 0;
    while (std::abs(v(pivot)) < largest * (1.0 - 1e-12)) ++pivot;
    v *= std::polar(1.0, -std::arg(v(pivot)));
    v(pivot) = std::abs(v(pivot));
  }
  return out;
}

ComplexMatrix nearest_unitary(const ComplexMatrix& m, double rank_tolerance) {
  if (m.rows() != m.cols()) throw Error("nearest_unitary requires a square matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > rank_tolerance * sv(0))) {
    std::ostringstream msg;
    msg << "nearest_unitary: matrix is rank deficient (smallest singular value " << smallest
        << ", largest " << sv(0) << ")";
    throw RankDeficientError(msg.str(), smallest);
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

double unitarity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error("unitarity_defect requires a square matrix");
  return max_entry_norm(m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols()));
}

ComplexMatrix unitary_exponential(const ComplexMatrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (h + h.adjoint()));
  const RealVector& w = solver.eigenvalues();
  ComplexVector phases(w.size());
  for (Index i = 0; i < w.size(); ++i) phases(i) = std::polar(1.0, -w(i) * dt);
  const ComplexMatrix& v = solver.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace holosim
