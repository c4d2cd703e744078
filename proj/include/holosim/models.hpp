#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "holosim/linalg.hpp"

namespace holosim {

using ParameterPoint = Eigen::VectorXd;

// A family of Hermitian matrices H(lambda) over a real parameter space.
// Models may also supply their spectrum in closed form; callers that need
// exact eigenvalues (e.g. an identically vanishing dark-state energy) use it.
class HamiltonianModel {
 public:
  using Evaluator = std::function<ComplexMatrix(const ParameterPoint&)>;
  using Spectrum = std::function<RealVector(const ParameterPoint&)>;

  HamiltonianModel(std::string label, Index dim, Index parameter_dim, Evaluator evaluate,
                   Spectrum exact_spectrum = {});

  const std::string& label() const noexcept { return label_; }
  Index dim() const noexcept { return dim_; }
  Index parameter_dim() const noexcept { return parameter_dim_; }

  ComplexMatrix operator()(const ParameterPoint& lambda) const;
  // Ascending eigenvalues from the closed form, if the model has one.
  std::optional<RealVector> exact_spectrum(const ParameterPoint& lambda) const;

 private:
  std::string label_;
  Index dim_;
  Index parameter_dim_;
  Evaluator evaluate_;
  Spectrum spectrum_;
};

// Map s in [0,1] -> parameter point. Closed paths wrap s into [0,1), so
// lambda(1) == lambda(0) holds bit-for-bit.
class ParameterPath {
 public:
  using Map = std::function<ParameterPoint(double)>;

  ParameterPath(std::string label, Index parameter_dim, bool closed, Map map);

  const std::string& label() const noexcept { return label_; }
  Index parameter_dim() const noexcept { return parameter_dim_; }
  bool closed() const noexcept { return closed_; }

  ParameterPoint operator()(double s) const;

  // Closed: n points at s = k/n, k < n. Open: n + 1 points including both ends.
  std::vector<double> sample_positions(std::size_t n) const;

  // Same curve traversed from s = 1 back to s = 0 (basepoint kept for closed paths).
  ParameterPath reversed() const;

 private:
  std::string label_;
  Index parameter_dim_;
  bool closed_;
  Map map_;
};

ParameterPath make_constant_path(ParameterPoint point, bool closed = true);

// --- single qubit, H = n . sigma -------------------------------------------

struct QubitDirection {
  Eigen::Vector3d n;

  double norm() const { return n.norm(); }
  double theta() const;  // polar angle from +z
  double phi() const;    // azimuth in (-pi, pi]
  static QubitDirection from_angles(double theta, double phi, double radius = 1.0);
};

ComplexMatrix qubit_hamiltonian(const QubitDirection& direction);

// lambda = (n_x, n_y, n_z)
HamiltonianModel qubit_model();
// lambda = (theta, phi) on a sphere of the given radius.
HamiltonianModel qubit_sphere_model(double radius = 1.0);
// lambda = (x, z), H = x sigma_x + z sigma_z; eigenvectors can be chosen real.
HamiltonianModel qubit_real_model();

// Ground state of n . sigma (Bloch vector anti-parallel to n).
StateVector qubit_ground_state(const Eigen::Vector3d& direction);
// Spin-up along n (Bloch vector parallel to n).
StateVector bloch_state(const Eigen::Vector3d& direction);

// Closed loop n(s) = radius (sin t0 cos 2 pi s, sin t0 sin 2 pi s, cos t0).
// orientation = -1 traverses it clockwise seen from +z.
ParameterPath make_azimuthal_loop(double theta0, double radius = 1.0, int orientation = 1);

// --- four-level dark-state system ------------------------------------------

struct UsbParameters {
  double pump = 0.0;     // couples levels 1-2
  double stokes = 0.0;   // couples levels 2-3
  double control = 0.0;  // couples levels 2-4
};

ComplexMatrix usb_hamiltonian(const UsbParameters& p);
// lambda = (pump, stokes, control). Exact spectrum {-R, 0, 0, R}.
HamiltonianModel usb_model();
UsbParameters usb_parameters(const ParameterPoint& lambda);

// mixing = atan2(pump, stokes), elevation = atan2(control, sqrt(pump^2 + stokes^2))
struct DarkAngles {
  double mixing;
  double elevation;
};
DarkAngles usb_dark_angles(const UsbParameters& p);

struct DarkFrame {
  StateVector first;
  StateVector second;
  ComplexMatrix matrix() const;  // 4 x 2, columns (first, second)
};
DarkFrame usb_dark_frame(const UsbParameters& p);

// Closed loop in (pump, stokes, control) space:
//   stokes  = stokes_offset + radius cos 2 pi s
//   pump    = radius sin 2 pi s
//   control = control_offset + control_amplitude sin 2 pi s
// The mixing angle winds once around the origin when |stokes_offset| < radius.
struct UsbCircleLoop {
  double stokes_offset = 0.3;
  double radius = 1.0;
  double control_offset = 0.8;
  double control_amplitude = 0.4;
};

// Rejects loops that touch pump = stokes = 0 (checked on a dense grid).
ParameterPath make_usb_loop(const UsbCircleLoop& loop, std::size_t validation_samples = 4096);
ParameterPath make_usb_constant_loop(const UsbParameters& p);

// Default loop shipped with the project; its eta is stored as a golden value.
inline constexpr UsbCircleLoop kDefaultUsbLoop{};
// Dark-space block (eigenvalue indices 1, 2) of the usb model.
inline constexpr BandBlock kUsbDarkBlock{1, 2};

}  // namespace holosim
