#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "holosim/linalg.hpp"
#include "holosim/models.hpp"

namespace holosim {

// Ordered sequence of equal-dimension states. For closed chains the last
// state links back to the first.
class StateChain {
 public:
  StateChain(std::vector<StateVector> states, bool closed);

  std::size_t size() const noexcept { return states_.size(); }
  bool closed() const noexcept { return closed_; }
  const StateVector& operator[](std::size_t k) const { return states_[k]; }
  const std::vector<StateVector>& states() const noexcept { return states_; }

  // Number of links: size - 1 for open chains, size for closed ones.
  std::size_t link_count() const noexcept;
  // <psi_k | psi_{k+1}>, wrapping for the closing link. Throws OverlapError
  // when the modulus falls below overlap_tol.
  Complex link(std::size_t k, double overlap_tol = tol::overlap) const;

  StateChain reversed() const;

 private:
  std::vector<StateVector> states_;
  bool closed_;
};

struct GeometricPhaseResult {
  double phase;        // (-pi, pi]
  double min_overlap;  // smallest |<psi_k|psi_{k+1}>|
  std::size_t samples;
};

// Sign convention used throughout: phase = arg prod_k <psi_k|psi_{k+1}>.
// For the ground band of n . sigma on a counter-clockwise loop this is -Omega/2.
// The phase picked up by a parallel-transported state (i oint <psi|d psi>) is
// its negative.

// arg of the cyclic overlap product of n >= 3 states.
double pancharatnam_phase(const StateChain& chain);

GeometricPhaseResult discrete_geometric_phase(const StateChain& chain);

struct ParallelTransport {
  StateChain chain;
  // Closed input only: arg <psi_N | psi_0> where psi_N is the transported
  // image of the basepoint. Equals the discrete geometric phase.
  double closure_phase = 0.0;
};

// Rephases every state so consecutive overlaps are real and positive.
ParallelTransport parallel_transport(const StateChain& chain);

// Band eigenvectors of a model sampled along a path (gauge-fixed by eigh).
StateChain eigenstate_chain(const HamiltonianModel& model, Index band, const ParameterPath& path,
                            std::size_t samples);

// Gauge-fixed eigenvector of one band; throws when the band is degenerate.
StateVector band_state(const HamiltonianModel& model, Index band, const ParameterPoint& lambda);

// Berry connection A_i = i <psi|d_i psi> by central differences.
// Gauge dependent: only closed-loop integrals of it are physical, and
// oint A = -discrete_geometric_phase (mod 2 pi).
using StateField = std::function<StateVector(const ParameterPoint&)>;
double berry_connection_fd(const StateField& field, const ParameterPoint& lambda, Index direction,
                           double h);
// Uses band_state, i.e. the largest component real positive.
double berry_connection_fd(const HamiltonianModel& model, Index band, const ParameterPoint& lambda,
                           Index direction, double h);

struct CurvatureSample {
  ParameterPoint point;
  std::pair<Index, Index> plane;
  double value;  // plaquette phase / edge^2
  double plaquette_size;
};

// Phase of the four-corner overlap product around a square plaquette of edge
// a centred on lambda, traversed +i then +j, divided by a^2.
CurvatureSample berry_curvature_plaquette(const HamiltonianModel& model, Index band,
                                          const ParameterPoint& lambda, std::pair<Index, Index> plane,
                                          double a);

// A rectangular patch tiled by nx * ny plaquettes. Node states are computed
// once and shared by neighbouring cells, so the flux telescopes exactly onto
// the boundary loop.
struct PlaquetteTiling {
  std::size_t nx = 0, ny = 0;
  std::vector<double> cell_phases;  // row-major, index iy * nx + ix
  double flux = 0.0;                // sum of cell phases
  double boundary_phase = 0.0;      // arg of the boundary loop product
};

PlaquetteTiling tile_plaquettes(const HamiltonianModel& model, Index band, const ParameterPoint& origin,
                                std::pair<Index, Index> plane, std::size_t nx, std::size_t ny,
                                double hx, double hy);

// Signed solid angle of a closed chain of directions, as a sum of signed
// spherical-triangle excesses from a reference vertex. Positive for loops that
// run counter-clockwise around the enclosed region seen from outside the sphere.
double solid_angle(std::span<const Eigen::Vector3d> directions);

}  // namespace holosim
