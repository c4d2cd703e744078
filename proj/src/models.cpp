#include "holosim/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace holosim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

HamiltonianModel::HamiltonianModel(std::string label, Index dim, Index parameter_dim,
                                   Evaluator evaluate, Spectrum exact_spectrum)
    : label_(std::move(label)),
      dim_(dim),
      parameter_dim_(parameter_dim),
      evaluate_(std::move(evaluate)),
      spectrum_(std::move(exact_spectrum)) {
  if (dim_ < 1 || parameter_dim_ < 1 || !evaluate_) throw Error("invalid Hamiltonian model");
}

ComplexMatrix HamiltonianModel::operator()(const ParameterPoint& lambda) const {
  if (lambda.size() != parameter_dim_) {
    std::ostringstream msg;
    msg << label_ << ": expected " << parameter_dim_ << " parameters, got " << lambda.size();
    throw Error(msg.str());
  }
  return evaluate_(lambda);
}

std::optional<RealVector> HamiltonianModel::exact_spectrum(const ParameterPoint& lambda) const {
  if (!spectrum_) return std::nullopt;
  return spectrum_(lambda);
}

ParameterPath::ParameterPath(std::string label, Index parameter_dim, bool closed, Map map)
    : label_(std::move(label)), parameter_dim_(parameter_dim), closed_(closed), map_(std::move(map)) {
  if (!map_) throw Error("parameter path without a map");
  if (closed_) {
    const ParameterPoint a = map_(0.0);
    const ParameterPoint b = map_(1.0);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - b).norm() >= tol::closure * scale) {
      std::ostringstream msg;
      msg << "path '" << label_ << "' flagged closed but |lambda(1) - lambda(0)| = " << (a - b).norm();
      throw Error(msg.str());
    }
  }
}

ParameterPoint ParameterPath::operator()(double s) const {
  if (closed_) s -= std::floor(s);
  return map_(s);
}

std::vector<double> ParameterPath::sample_positions(std::size_t n) const {
  if (n < 1) throw Error("path sampling needs at least one interval");
  const std::size_t count = closed_ ? n : n + 1;
  std::vector<double> s(count);
  for (std::size_t k = 0; k < count; ++k) s[k] = static_cast<double>(k) / static_cast<double>(n);
  return s;
}

ParameterPath ParameterPath::reversed() const {
  // goes through operator() so closed paths keep their wrapped basepoint
  return ParameterPath(label_ + " (reversed)", parameter_dim_, closed_,
                       [forward = *this](double s) { return forward(1.0 - s); });
}

ParameterPath make_constant_path(ParameterPoint point, bool closed) {
  const Index dim = point.size();
  return ParameterPath("constant", dim, closed, [point = std::move(point)](double) { return point; });
}

// --- qubit -----------------------------------------------------------------

double QubitDirection::theta() const {
  return std::atan2(std::hypot(n.x(), n.y()), n.z());
}

double QubitDirection::phi() const { return std::atan2(n.y(), n.x()); }

QubitDirection QubitDirection::from_angles(double theta, double phi, double radius) {
  return {radius * Eigen::Vector3d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                   std::cos(theta))};
}

ComplexMatrix qubit_hamiltonian(const QubitDirection& d) {
  ComplexMatrix h(2, 2);
  h << Complex(d.n.z(), 0.0), Complex(d.n.x(), -d.n.y()),
       Complex(d.n.x(), d.n.y()), Complex(-d.n.z(), 0.0);
  return h;
}

namespace {
RealVector qubit_spectrum(double r) { return (RealVector(2) << -r, r).finished(); }
}  // namespace

HamiltonianModel qubit_model() {
  return HamiltonianModel(
      "qubit", 2, 3,
      [](const ParameterPoint& l) { return qubit_hamiltonian({Eigen::Vector3d(l(0), l(1), l(2))}); },
      [](const ParameterPoint& l) { return qubit_spectrum(l.head<3>().norm()); });
}

HamiltonianModel qubit_sphere_model(double radius) {
  return HamiltonianModel(
      "qubit-sphere", 2, 2,
      [radius](const ParameterPoint& l) {
        return qubit_hamiltonian(QubitDirection::from_angles(l(0), l(1), radius));
      },
      [radius](const ParameterPoint&) { return qubit_spectrum(std::abs(radius)); });
}

HamiltonianModel qubit_real_model() {
  return HamiltonianModel(
      "qubit-real", 2, 2,
      [](const ParameterPoint& l) { return qubit_hamiltonian({Eigen::Vector3d(l(0), 0.0, l(1))}); },
      [](const ParameterPoint& l) { return qubit_spectrum(std::hypot(l(0), l(1))); });
}

StateVector qubit_ground_state(const Eigen::Vector3d& direction) {
  const QubitDirection d{direction};
  const double t = d.theta();
  ComplexVector v(2);
  v << std::sin(t / 2.0), -std::polar(std::cos(t / 2.0), d.phi());
  return StateVector(std::move(v));
}

StateVector bloch_state(const Eigen::Vector3d& direction) {
  const QubitDirection d{direction};
  const double t = d.theta();
  ComplexVector v(2);
  v << std::cos(t / 2.0), std::polar(std::sin(t / 2.0), d.phi());
  return StateVector(std::move(v));
}

ParameterPath make_azimuthal_loop(double theta0, double radius, int orientation) {
  if (!(theta0 > 0.0 && theta0 < std::numbers::pi))
    throw Error("azimuthal loop needs 0 < theta0 < pi; use make_constant_path for a point");
  if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
  const double sign = orientation;
  std::ostringstream label;
  label << "azimuthal(theta0=" << theta0 << (orientation < 0 ? ", clockwise)" : ")");
  return ParameterPath(label.str(), 3, true, [=](double s) {
    const double phi = sign * kTwoPi * s;
    return ParameterPoint(
        radius * Eigen::Vector3d(std::sin(theta0) * std::cos(phi), std::sin(theta0) * std::sin(phi),
                                 std::cos(theta0)));
  });
}

// --- four-level system -----------------------------------------------------

ComplexMatrix usb_hamiltonian(const UsbParameters& p) {
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  h(0, 1) = h(1, 0) = p.pump;
  h(1, 2) = h(2, 1) = p.stokes;
  h(1, 3) = h(3, 1) = p.control;
  return h;
}

UsbParameters usb_parameters(const ParameterPoint& lambda) {
  if (lambda.size() != 3) throw Error("usb parameters need (pump, stokes, control)");
  return {lambda(0), lambda(1), lambda(2)};
}

HamiltonianModel usb_model() {
  return HamiltonianModel(
      "usb", 4, 3, [](const ParameterPoint& l) { return usb_hamiltonian(usb_parameters(l)); },
      [](const ParameterPoint& l) {
        const double r = l.head<3>().norm();
        return (RealVector(4) << -r, 0.0, 0.0, r).finished();
      });
}

DarkAngles usb_dark_angles(const UsbParameters& p) {
  const double transverse = std::hypot(p.pump, p.stokes);
  if (!(transverse > 0.0)) throw DarkFrameError("dark frame angle undefined at pump = stokes = 0", 0.0);
  return {std::atan2(p.pump, p.stokes), std::atan2(p.control, transverse)};
}

ComplexMatrix DarkFrame::matrix() const {
  ComplexMatrix m(4, 2);
  m.col(0) = first.amplitudes();
  m.col(1) = second.amplitudes();
  return m;
}

DarkFrame usb_dark_frame(const UsbParameters& p) {
  const auto [mixing, elevation] = usb_dark_angles(p);
  const double ct = std::cos(mixing), st = std::sin(mixing);
  const double cp = std::cos(elevation), sp = std::sin(elevation);
  ComplexVector first(4), second(4);
  first << ct, 0.0, -st, 0.0;
  second << sp * st, 0.0, sp * ct, -cp;
  return {StateVector(std::move(first)), StateVector(std::move(second))};
}

ParameterPath make_usb_loop(const UsbCircleLoop& loop, std::size_t validation_samples) {
  std::ostringstream label;
  label << "usb-circle(stokes_offset=" << loop.stokes_offset << ", radius=" << loop.radius
        << ", control_offset=" << loop.control_offset
        << ", control_amplitude=" << loop.control_amplitude << ")";
  ParameterPath path(label.str(), 3, true, [loop](double s) {
    const double c = std::cos(kTwoPi * s), sn = std::sin(kTwoPi * s);
    return ParameterPoint(Eigen::Vector3d(loop.radius * sn, loop.stokes_offset + loop.radius * c,
                                          loop.control_offset + loop.control_amplitude * sn));
  });
  const double scale = std::max({1.0, std::abs(loop.stokes_offset), std::abs(loop.radius)});
  for (double s : path.sample_positions(validation_samples)) {
    const ParameterPoint l = path(s);
    if (std::hypot(l(0), l(1)) <= 1e-9 * scale) {
      std::ostringstream msg;
      msg << "usb loop passes through pump = stokes = 0 near s = " << s;
      throw DarkFrameError(msg.str(), s);
    }
  }
  return path;
}

ParameterPath make_usb_constant_loop(const UsbParameters& p) {
  usb_dark_angles(p);
  return make_constant_path(ParameterPoint(Eigen::Vector3d(p.pump, p.stokes, p.control)), true);
}

}  // namespace holosim
