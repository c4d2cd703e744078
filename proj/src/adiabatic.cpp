#include "holosim/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "holosim/holonomy.hpp"
#include "holosim/parallel.hpp"

namespace holosim {

namespace {

const Complex kI{0.0, 1.0};

void validate(const AdiabaticRun& run) {
  if (!(run.total_time > 0.0)) throw Error("adiabatic run needs total_time > 0");
  if (run.steps < 16) throw Error("adiabatic run needs at least 16 steps");
  if (run.path.parameter_dim() != run.model.parameter_dim())
    throw Error("path and model parameter dimensions differ");
}

ComplexMatrix step_propagator(const AdiabaticRun& run, double t, double dt) {
  auto h_at = [&](double time) { return run.model(run.path(time / run.total_time)); };
  switch (run.stepper) {
    case Stepper::midpoint:
      return unitary_exponential(h_at(t + 0.5 * dt), dt);
    case Stepper::magnus4: {
      const double offset = std::sqrt(3.0) / 6.0;
      const ComplexMatrix h1 = h_at(t + (0.5 - offset) * dt);
      const ComplexMatrix h2 = h_at(t + (0.5 + offset) * dt);
      // exp(-i K) with K = dt/2 (H1 + H2) + i sqrt(3)/12 dt^2 [H1, H2], K Hermitian
      const ComplexMatrix k =
          0.5 * dt * (h1 + h2) + kI * (std::sqrt(3.0) / 12.0 * dt * dt) * (h1 * h2 - h2 * h1);
      return unitary_exponential(k, 1.0);
    }
  }
  throw Error("unknown stepper");
}

}  // namespace

Evolution evolve_schrodinger(const AdiabaticRun& run, const ComplexMatrix& initial_states) {
  validate(run);
  if (initial_states.rows() != run.model.dim()) throw Error("initial state dimension does not match the model");

  const double dt = run.total_time / static_cast<double>(run.steps);
  Evolution out;
  out.propagator = ComplexMatrix::Identity(run.model.dim(), run.model.dim());
  double max_norm_h = 0.0;
  for (std::size_t k = 0; k < run.steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const ComplexMatrix step = step_propagator(run, t, dt);
    out.max_step_unitarity_defect = std::max(out.max_step_unitarity_defect, unitarity_defect(step));
    out.propagator = step * out.propagator;
    if (k % 64 == 0) max_norm_h = std::max(max_norm_h, eigh(run.model(run.path(t / run.total_time))).spectral_radius());
  }

  out.final_states = out.propagator * initial_states;
  for (Index a = 0; a < initial_states.cols(); ++a) {
    const double n0 = initial_states.col(a).norm();
    if (n0 > 0.0) out.norm_drift = std::max(out.norm_drift, std::abs(out.final_states.col(a).norm() / n0 - 1.0));
  }

  const double phase_per_step = dt * max_norm_h;
  if (phase_per_step > 0.5) {
    const int order = run.stepper == Stepper::magnus4 ? 4 : 2;
    std::ostringstream msg;
    msg << "step count may be too small: dt * ||H|| = " << phase_per_step
        << ", estimated per-step error ~ " << std::pow(phase_per_step, order + 1);
    out.warnings.push_back(msg.str());
  }
  return out;
}

double dynamical_phase(const HamiltonianModel& model, const ParameterPath& path, double total_time,
                       BandBlock block, std::size_t intervals) {
  if (!(total_time > 0.0)) throw Error("dynamical_phase needs total_time > 0");
  if (block.first < 0 || block.count < 1 || block.end() > model.dim()) throw Error("band block outside the spectrum");
  if (intervals < 2) intervals = 2;
  if (intervals % 2) ++intervals;

  auto energy = [&](double s) {
    const ParameterPoint lambda = path(s);
    RealVector spectrum;
    if (auto exact = model.exact_spectrum(lambda)) {
      spectrum = std::move(*exact);
    } else {
      const EigenDecomposition e = eigh(model(lambda));
      double gap = std::numeric_limits<double>::infinity();
      if (block.first > 0) gap = std::min(gap, e.eigenvalues(block.first) - e.eigenvalues(block.first - 1));
      if (block.end() < e.eigenvalues.size())
        gap = std::min(gap, e.eigenvalues(block.end()) - e.eigenvalues(block.end() - 1));
      if (!(gap > tol::degeneracy * e.spectral_radius())) {
        std::ostringstream msg;
        msg << "dynamical_phase: band gap closes at s = " << s;
        throw GapClosureError(msg.str(), s, gap);
      }
      spectrum = e.eigenvalues;
    }
    return spectrum.segment(block.first, block.count).mean();
  };

  const double h = 1.0 / static_cast<double>(intervals);
  double sum = energy(0.0) + energy(1.0);
  for (std::size_t k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * energy(static_cast<double>(k) * h);
  // ds = dt / T
  return -total_time * sum * h / 3.0;
}

AdiabaticResult adiabatic_holonomy(const AdiabaticRun& run, BandBlock block,
                                   const std::optional<ComplexMatrix>& initial_frame) {
  validate(run);
  if (!run.path.closed()) throw Error("adiabatic_holonomy needs a closed loop");
  const EigenDecomposition e0 = eigh(run.model(run.path(0.0)));
  const ComplexMatrix eigen_frame = e0.block(block);
  ComplexMatrix frame = eigen_frame;
  if (initial_frame) {
    frame = *initial_frame;
    if (frame.rows() != run.model.dim() || frame.cols() != block.count)
      throw Error("initial frame has the wrong shape for the block");
    if (max_entry_norm(frame - eigen_frame * (eigen_frame.adjoint() * frame)) > 1e-8)
      throw Error("initial frame does not span the block at the basepoint");
  }

  const Evolution ev = evolve_schrodinger(run, frame);
  AdiabaticResult out;
  out.final_states = ev.final_states;
  out.norm_drift = ev.norm_drift;
  out.warnings = ev.warnings;
  out.dynamical_phase =
      dynamical_phase(run.model, run.path, run.total_time, block, std::max<std::size_t>(4096, 2 * run.steps));

  const ComplexMatrix projected = frame.adjoint() * ev.final_states;  // <F0_a | U | F0_b>
  out.unstripped_overlap = projected.adjoint();
  out.overlap_matrix = out.unstripped_overlap * std::polar(1.0, out.dynamical_phase);
  for (Index b = 0; b < projected.cols(); ++b)
    out.leakage = std::max(out.leakage, std::clamp(1.0 - projected.col(b).squaredNorm(), 0.0, 1.0));
  return out;
}

double prediction_error(const ComplexMatrix& overlap, const ComplexMatrix& prediction) {
  if (overlap.rows() != prediction.rows() || overlap.cols() != prediction.cols())
    throw Error("prediction_error: dimension mismatch");
  if (overlap.rows() == 1) return std::abs(wrap_angle(std::arg(overlap(0, 0)) - std::arg(prediction(0, 0))));
  return holonomy_distance(nearest_unitary(overlap), prediction);
}

SweepTable convergence_sweep(const HamiltonianModel& model, const ParameterPath& loop, BandBlock block,
                             const std::vector<double>& total_times, double steps_per_unit_time,
                             const ComplexMatrix& prediction, const std::optional<ComplexMatrix>& initial_frame,
                             Stepper stepper) {
  if (total_times.size() < 3) throw Error("convergence_sweep needs at least three total times");
  for (std::size_t k = 1; k < total_times.size(); ++k)
    if (!(total_times[k] > total_times[k - 1])) throw Error("convergence_sweep times must ascend");
  if (!(steps_per_unit_time > 0.0)) throw Error("steps_per_unit_time must be positive");

  SweepTable table;
  table.rows.resize(total_times.size());
  parallel_for(total_times.size(), [&](std::size_t k) {
    const double t = total_times[k];
    const auto steps = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(steps_per_unit_time * t)));
    const AdiabaticResult r = adiabatic_holonomy({model, loop, t, steps, stepper}, block, initial_frame);
    table.rows[k] = {t, steps, prediction_error(r.overlap_matrix, prediction),
                     prediction_error(r.unstripped_overlap, prediction), r.leakage};
  });

  std::vector<double> x, y;
  for (const auto& row : table.rows) {
    x.push_back(row.total_time);
    y.push_back(row.distance);
  }
  table.slope = loglog_slope(x, y);
  return table;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("loglog_slope needs matching series of length >= 2");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace holosim
