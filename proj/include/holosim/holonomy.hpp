#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "holosim/linalg.hpp"
#include "holosim/models.hpp"

namespace holosim {

// Orthonormal frames (dim x m) spanning one eigenvalue block along a sampled
// path, gauge-smoothed so that every link overlap F_k^dagger F_{k+1} except
// the closing one is Hermitian positive.
struct FramePath {
  std::vector<ComplexMatrix> frames;
  std::vector<double> positions;  // s of each frame
  BandBlock block;
  bool closed = true;
};

struct FrameOptions {
  // Minimum separation of the block from the rest of the spectrum, relative
  // to the spectral radius at each sample.
  double gap_tolerance = tol::degeneracy;
  double subspace_overlap_tolerance = tol::subspace_overlap;
};

// Tracks the block along the path. If an initial frame is given it must span
// the block at s = 0 and is used verbatim as the basepoint frame; otherwise
// eigh's frame at s = 0 is used. The last frame is not aligned with the first:
// that mismatch is the holonomy.
FramePath eigenframe_path(const HamiltonianModel& model, const ParameterPath& path, BandBlock block,
                          std::size_t samples, const std::optional<ComplexMatrix>& initial_frame = std::nullopt,
                          const FrameOptions& options = {});

struct HolonomyResult {
  ComplexMatrix matrix;           // unitarized, in the basis of the basepoint frame
  double unitarity_defect;        // of `matrix`
  double raw_unitarity_defect;    // of the link product before unitarization
  std::size_t samples;
  std::optional<double> eta_estimate;
};

// Ordered product W_0 W_1 ... W_{N-1} of link overlaps W_k = F_k^dagger F_{k+1},
// closing link F_{N-1}^dagger F_0 included, then unitarized. For m = 1 this is
// exp(i * discrete_geometric_phase).
HolonomyResult wilson_line(const FramePath& frames);

// Two quadratures of eta = oint sin(elevation) d(mixing) over a (pump, stokes,
// control) path: the angle form with unwrapped mixing angle (trapezoid), and
// for closed paths the line-integral form
//   oint control (stokes dP - pump dS) / ((P^2 + S^2) sqrt(P^2 + S^2 + control^2))
// (midpoint rule). Both converge as O(1/N^2).
struct EtaEstimate {
  double angle_form = 0.0;
  std::optional<double> line_form;

  double value() const noexcept { return angle_form; }
  double discrepancy() const noexcept { return line_form ? std::abs(*line_form - angle_form) : 0.0; }
};

EtaEstimate usb_eta(const ParameterPath& path, std::size_t samples);

// Closed-form dark-space holonomy: ((cos eta, sin eta), (-sin eta, cos eta)).
Eigen::Matrix2d usb_holonomy_closed_form(double eta);

// Wilson line of the usb dark block with the analytic dark frame as basepoint
// frame, so the result is directly comparable with usb_holonomy_closed_form.
HolonomyResult usb_wilson_line(const ParameterPath& loop, std::size_t samples);
ComplexMatrix usb_basepoint_frame(const ParameterPath& loop);

// min over alpha of max_ij |e^{i alpha} U_ij - V_ij|
double holonomy_distance(const ComplexMatrix& u, const ComplexMatrix& v);

}  // namespace holosim
