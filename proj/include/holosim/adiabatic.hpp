#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holosim/linalg.hpp"
#include "holosim/models.hpp"

namespace holosim {

// Per-step propagators. Both exponentiate a Hermitian generator, so every
// step is unitary to rounding.
//   midpoint: exp(-i dt H(t + dt/2))                          (order 2)
//   magnus4 : two-point Gauss-Legendre Magnus expansion       (order 4)
enum class Stepper { midpoint, magnus4 };

// The schedule is linear: lambda(t) = path(t / total_time). Time is in units
// of the inverse coupling scale (hbar = 1).
struct AdiabaticRun {
  HamiltonianModel model;
  ParameterPath path;
  double total_time = 1.0;
  std::size_t steps = 1024;
  Stepper stepper = Stepper::magnus4;
};

struct Evolution {
  ComplexMatrix propagator;           // U(T), dim x dim
  ComplexMatrix final_states;         // U(T) applied to the initial columns
  double max_step_unitarity_defect = 0.0;
  double norm_drift = 0.0;            // max_a | ||psi_a(T)|| - 1 |
  std::vector<std::string> warnings;
};

// Integrates i d psi/dt = H(lambda(t/T)) psi for every column of initial_states.
Evolution evolve_schrodinger(const AdiabaticRun& run, const ComplexMatrix& initial_states);

// delta = -int_0^T eps_block(lambda(t/T)) dt (composite Simpson). Uses the
// model's closed-form spectrum when it has one, so an identically zero band
// energy gives exactly 0. Block energy is the mean over the block.
double dynamical_phase(const HamiltonianModel& model, const ParameterPath& path, double total_time,
                       BandBlock block, std::size_t intervals = 4096);

struct AdiabaticResult {
  ComplexMatrix final_states;
  double dynamical_phase = 0.0;
  double leakage = 0.0;                // max over columns of 1 - ||P psi_a(T)||^2
  // M_ab = conj(<F0_a|U|F0_b>) e^{i delta}: same convention as wilson_line, so
  // M -> wilson_line(loop) as T -> infinity.
  ComplexMatrix overlap_matrix;
  ComplexMatrix unstripped_overlap;    // without the e^{i delta} factor
  double norm_drift = 0.0;
  std::vector<std::string> warnings;
};

// Evolves each column of the basepoint frame (eigh frame of the block unless
// given) around the closed loop and projects the result back onto it.
AdiabaticResult adiabatic_holonomy(const AdiabaticRun& run, BandBlock block,
                                   const std::optional<ComplexMatrix>& initial_frame = std::nullopt);

struct SweepRow {
  double total_time;
  std::size_t steps;
  double distance;             // to the geometric prediction (phase error for m = 1)
  double unstripped_distance;  // same, without removing the dynamical phase
  double leakage;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // least-squares d log(distance) / d log(T); NaN if any distance is 0
};

// Distance between an adiabatic overlap matrix and the geometric prediction:
// holonomy_distance of the unitarized overlap for blocks with m > 1, wrapped
// phase error for m = 1 (where the global-phase quotient would hide everything).
double prediction_error(const ComplexMatrix& overlap, const ComplexMatrix& prediction);

SweepTable convergence_sweep(const HamiltonianModel& model, const ParameterPath& loop, BandBlock block,
                             const std::vector<double>& total_times, double steps_per_unit_time,
                             const ComplexMatrix& prediction,
                             const std::optional<ComplexMatrix>& initial_frame = std::nullopt,
                             Stepper stepper = Stepper::magnus4);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace holosim
