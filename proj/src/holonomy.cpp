#include "holosim/holonomy.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

#include "holosim/parallel.hpp"

namespace holosim {

namespace {

// Polar factor with an explicit conditioning check on the smallest singular value.
ComplexMatrix aligned_polar(const ComplexMatrix& overlap, double min_singular, std::size_t index,
                            const char* what) {
  Eigen::JacobiSVD<ComplexMatrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smallest = svd.singularValues().minCoeff();
  if (!(smallest > min_singular)) {
    std::ostringstream msg;
    msg << what << " " << index << " is ill-conditioned (smallest singular value " << smallest << ")";
    throw OverlapError(msg.str(), index, smallest);
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

FramePath eigenframe_path(const HamiltonianModel& model, const ParameterPath& path, BandBlock block,
                          std::size_t samples, const std::optional<ComplexMatrix>& initial_frame,
                          const FrameOptions& options) {
  if (samples < 16) throw Error("eigenframe_path needs at least 16 samples");
  if (block.first < 0 || block.count < 1 || block.end() > model.dim())
    throw Error("band block outside the model spectrum");

  FramePath out;
  out.positions = path.sample_positions(samples);
  out.block = block;
  out.closed = path.closed();
  const std::size_t n = out.positions.size();

  // Raw frames: independent eigensolves, arbitrary gauge within the block.
  // Gaps are judged against the largest spectral radius seen on the path, so a
  // Hamiltonian that shrinks to zero somewhere still counts as a closure.
  std::vector<ComplexMatrix> raw(n);
  std::vector<double> gaps(n), radii(n);
  parallel_for(n, [&](std::size_t k) {
    const EigenDecomposition e = eigh(model(path(out.positions[k])));
    double gap = std::numeric_limits<double>::infinity();
    if (block.first > 0) gap = std::min(gap, e.eigenvalues(block.first) - e.eigenvalues(block.first - 1));
    if (block.end() < e.eigenvalues.size())
      gap = std::min(gap, e.eigenvalues(block.end()) - e.eigenvalues(block.end() - 1));
    gaps[k] = gap;
    radii[k] = e.spectral_radius();
    raw[k] = e.block(block);
  });
  const double gap_tol = options.gap_tolerance * *std::max_element(radii.begin(), radii.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (!(gaps[k] > gap_tol)) {
      std::ostringstream msg;
      msg << model.label() << ": spectral gap of the tracked block closes at s = " << out.positions[k]
          << " (gap " << gaps[k] << ")";
      throw GapClosureError(msg.str(), out.positions[k], gaps[k]);
    }
  }

  // Sequential smoothing pass: F_k = E_k polar(E_k^dagger F_{k-1}).
  out.frames.reserve(n);
  if (initial_frame) {
    const ComplexMatrix& f0 = *initial_frame;
    if (f0.rows() != model.dim() || f0.cols() != block.count)
      throw Error("initial frame has the wrong shape for the block");
    const ComplexMatrix eye = ComplexMatrix::Identity(block.count, block.count);
    if (max_entry_norm(f0.adjoint() * f0 - eye) > 1e-10) throw Error("initial frame is not orthonormal");
    const ComplexMatrix outside = f0 - raw[0] * (raw[0].adjoint() * f0);
    if (max_entry_norm(outside) > 1e-8) throw Error("initial frame does not span the block at s = 0");
    out.frames.push_back(f0);
  } else {
    out.frames.push_back(raw[0]);
  }
  for (std::size_t k = 1; k < n; ++k) {
    const ComplexMatrix overlap = raw[k].adjoint() * out.frames[k - 1];
    out.frames.push_back(raw[k] * aligned_polar(overlap, options.subspace_overlap_tolerance, k - 1, "frame link"));
  }
  return out;
}

HolonomyResult wilson_line(const FramePath& fp) {
  if (!fp.closed) throw Error("wilson_line needs frames sampled along a closed path");
  const std::size_t n = fp.frames.size();
  if (n < 2) throw Error("wilson_line needs at least two frames");
  const Index m = fp.frames.front().cols();
  ComplexMatrix product = ComplexMatrix::Identity(m, m);
  for (std::size_t k = 0; k < n; ++k) {
    const ComplexMatrix link = fp.frames[k].adjoint() * fp.frames[(k + 1) % n];
    Eigen::JacobiSVD<ComplexMatrix> svd(link);
    const double smallest = svd.singularValues().minCoeff();
    if (!(smallest > tol::subspace_overlap)) {
      std::ostringstream msg;
      msg << "wilson_line: link " << k << " is ill-conditioned (smallest singular value " << smallest << ")";
      throw OverlapError(msg.str(), k, smallest);
    }
    product = product * link;
  }
  HolonomyResult out;
  out.raw_unitarity_defect = unitarity_defect(product);
  out.matrix = nearest_unitary(product);
  out.unitarity_defect = unitarity_defect(out.matrix);
  out.samples = n;
  return out;
}

EtaEstimate usb_eta(const ParameterPath& path, std::size_t samples) {
  if (samples < 2) throw Error("usb_eta needs at least two intervals");
  const double step = 1.0 / static_cast<double>(samples);

  auto angles = [&](double s) {
    const UsbParameters p = usb_parameters(path(s));
    try {
      return usb_dark_angles(p);
    } catch (const DarkFrameError&) {
      std::ostringstream msg;
      msg << "usb_eta: mixing angle undefined at s = " << s;
      throw DarkFrameError(msg.str(), s);
    }
  };

  EtaEstimate out;
  DarkAngles prev = angles(0.0);
  for (std::size_t k = 1; k <= samples; ++k) {
    const DarkAngles cur = angles(static_cast<double>(k) * step);
    const double dmix = wrap_angle(cur.mixing - prev.mixing);
    out.angle_form += 0.5 * (std::sin(prev.elevation) + std::sin(cur.elevation)) * dmix;
    prev = cur;
  }

  if (path.closed()) {
    double line = 0.0;
    ParameterPoint a = path(0.0);
    for (std::size_t k = 1; k <= samples; ++k) {
      const ParameterPoint b = path(static_cast<double>(k) * step);
      const ParameterPoint mid = path((static_cast<double>(k) - 0.5) * step);
      const double p = mid(0), s = mid(1), q = mid(2);
      const double transverse2 = p * p + s * s;
      if (!(transverse2 > 0.0)) {
        const double at = (static_cast<double>(k) - 0.5) * step;
        std::ostringstream msg;
        msg << "usb_eta: line integrand singular at s = " << at;
        throw DarkFrameError(msg.str(), at);
      }
      const double dp = b(0) - a(0), ds = b(1) - a(1);
      line += q * (s * dp - p * ds) / (transverse2 * std::sqrt(transverse2 + q * q));
      a = b;
    }
    out.line_form = line;
  }
  return out;
}

Eigen::Matrix2d usb_holonomy_closed_form(double eta) {
  Eigen::Matrix2d b;
  b << std::cos(eta), std::sin(eta), -std::sin(eta), std::cos(eta);
  return b;
}

ComplexMatrix usb_basepoint_frame(const ParameterPath& loop) {
  try {
    return usb_dark_frame(usb_parameters(loop(0.0))).matrix();
  } catch (const DarkFrameError&) {
    throw DarkFrameError("usb loop basepoint has pump = stokes = 0", 0.0);
  }
}

HolonomyResult usb_wilson_line(const ParameterPath& loop, std::size_t samples) {
  if (!loop.closed()) throw Error("usb_wilson_line needs a closed loop");
  const FramePath fp = eigenframe_path(usb_model(), loop, kUsbDarkBlock, samples, usb_basepoint_frame(loop));
  HolonomyResult out = wilson_line(fp);
  out.eta_estimate = usb_eta(loop, samples).value();
  return out;
}

double holonomy_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) throw Error("holonomy_distance: dimension mismatch");
  if (u.size() == 0) return 0.0;
  auto cost = [&](double alpha) { return max_entry_norm(std::polar(1.0, alpha) * u - v); };

  // Coarse scan, then golden-section refinement around the best bracket.
  constexpr int kCoarse = 720;
  const double h = 2.0 * std::numbers::pi / kCoarse;
  // Frobenius-optimal phase as an extra candidate.
  double best = cost(std::arg((u.adjoint() * v).trace()));
  double centre = 0.0, centre_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kCoarse; ++k) {
    const double a = k * h;
    const double c = cost(a);
    if (c < centre_cost) {
      centre_cost = c;
      centre = a;
    }
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = centre - h, hi = centre + h;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = cost(x1), f2 = cost(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = cost(x2);
    }
  }
  best = std::min({best, centre_cost, f1, f2});
  return best;
}

}  // namespace holosim
