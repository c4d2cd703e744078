#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "holosim/abelian.hpp"
#include "holosim/adiabatic.hpp"
#include "holosim/holonomy.hpp"
#include "oracles.hpp"

using namespace holosim;

namespace {

double rotating_field_error(Stepper stepper, std::size_t steps) {
  const double b = 1.3, theta = 0.8, total = 10.0;
  const AdiabaticRun run{qubit_model(), make_azimuthal_loop(theta, b), total, steps, stepper};
  const Evolution ev = evolve_schrodinger(run, ComplexMatrix::Identity(2, 2));
  const Eigen::Matrix2cd exact = oracle::rotating_field_propagator(b, theta, 2 * oracle::pi / total, total);
  return (ev.propagator - exact).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("constant Hamiltonian evolution is exact") {
  const Eigen::Vector3d n(0.2, 0.5, -0.4);
  const double total = 3.7;
  const AdiabaticRun run{qubit_model(), make_constant_path(ParameterPoint(n)), total, 64, Stepper::magnus4};
  const Evolution ev = evolve_schrodinger(run, ComplexMatrix::Identity(2, 2));
  const double r = n.norm();
  const ComplexMatrix exact = std::cos(r * total) * ComplexMatrix::Identity(2, 2) -
                              Complex(0, 1) * std::sin(r * total) * qubit_hamiltonian({n}) / r;
  CHECK((ev.propagator - exact).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("rotating field against the exact propagator") {
  CHECK(rotating_field_error(Stepper::magnus4, 400) < 1e-7);
  CHECK(rotating_field_error(Stepper::midpoint, 4000) < 1e-4);
  // observed orders of accuracy
  const double m1 = rotating_field_error(Stepper::magnus4, 200), m2 = rotating_field_error(Stepper::magnus4, 400);
  CHECK(std::log2(m1 / m2) == doctest::Approx(4.0).epsilon(0.1));
  const double p1 = rotating_field_error(Stepper::midpoint, 200), p2 = rotating_field_error(Stepper::midpoint, 400);
  CHECK(std::log2(p1 / p2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("steps stay unitary") {
  const AdiabaticRun run{usb_model(), make_usb_loop(kDefaultUsbLoop), 20.0, 500, Stepper::magnus4};
  const Evolution ev = evolve_schrodinger(run, ComplexMatrix::Identity(4, 4));
  CHECK(ev.max_step_unitarity_defect < 1e-13);
  CHECK(ev.norm_drift < 1e-12);
  CHECK(ev.warnings.empty());
  const AdiabaticRun coarse{usb_model(), make_usb_loop(kDefaultUsbLoop), 200.0, 50, Stepper::magnus4};
  CHECK_FALSE(evolve_schrodinger(coarse, ComplexMatrix::Identity(4, 4)).warnings.empty());
}

TEST_CASE("dynamical phase") {
  oracle::Gen g(41);
  for (int k = 0; k < 20; ++k) {
    const UsbCircleLoop l{g.uniform(-0.5, 0.5), g.uniform(0.6, 1.5), g.uniform(-1, 1), g.uniform(-1, 1)};
    CHECK(dynamical_phase(usb_model(), make_usb_loop(l), g.uniform(1, 1000), kUsbDarkBlock) == 0.0);
  }
  // ground band of a field of constant magnitude B: delta = B T
  const double b = 1.7, total = 12.0;
  const ParameterPath loop = make_azimuthal_loop(0.9, b);
  CHECK(dynamical_phase(qubit_model(), loop, total, {0, 1}) == doctest::Approx(b * total).epsilon(1e-12));
  // same value by quadrature when no closed-form spectrum is available
  const HamiltonianModel bare("bare qubit", 2, 3,
                              [](const ParameterPoint& l) { return qubit_hamiltonian({Eigen::Vector3d(l(0), l(1), l(2))}); });
  CHECK(dynamical_phase(bare, loop, total, {0, 1}) == doctest::Approx(b * total).epsilon(1e-10));
}

TEST_CASE("dark-space evolution approaches the Wilson line") {
  const ParameterPath loop = make_usb_loop(kDefaultUsbLoop);
  const ComplexMatrix f0 = usb_basepoint_frame(loop);
  const ComplexMatrix w = usb_wilson_line(loop, 8192).matrix;
  const AdiabaticResult r = adiabatic_holonomy({usb_model(), loop, 800.0, 12800, Stepper::magnus4}, kUsbDarkBlock, f0);
  CHECK(r.dynamical_phase == 0.0);
  CHECK(r.overlap_matrix == r.unstripped_overlap);
  CHECK(prediction_error(r.overlap_matrix, w) < 1e-4);
  CHECK(r.leakage < 1e-4);
}

TEST_CASE("convergence sweeps") {
  const ParameterPath loop = make_usb_loop(kDefaultUsbLoop);
  const ComplexMatrix f0 = usb_basepoint_frame(loop);
  const ComplexMatrix w = usb_wilson_line(loop, 8192).matrix;
  const SweepTable t = convergence_sweep(usb_model(), loop, kUsbDarkBlock, {25, 50, 100}, 16, w, f0);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[1].distance < t.rows[0].distance);
  CHECK(t.rows[2].distance < t.rows[1].distance);
  CHECK(std::isfinite(t.slope));

  const ParameterPath still = make_usb_constant_loop({0.3, 1.0, 0.5});
  const ComplexMatrix f_still = usb_basepoint_frame(still);
  const SweepTable z = convergence_sweep(usb_model(), still, kUsbDarkBlock, {10, 20, 40}, 16,
                                         ComplexMatrix::Identity(2, 2), f_still);
  for (const auto& row : z.rows) {
    CHECK(row.distance == doctest::Approx(0.0));
    CHECK(row.leakage == doctest::Approx(0.0));
  }

  // single band: the phase error falls with T
  const ParameterPath qloop = make_azimuthal_loop(1.0);
  const ComplexMatrix qw = wilson_line(eigenframe_path(qubit_model(), qloop, {0, 1}, 4096)).matrix;
  const SweepTable q = convergence_sweep(qubit_model(), qloop, {0, 1}, {20, 80, 320}, 16, qw);
  CHECK(q.rows[1].distance < q.rows[0].distance);
  CHECK(q.rows[2].distance < q.rows[1].distance);
  CHECK_THROWS_AS(convergence_sweep(qubit_model(), qloop, {0, 1}, {20, 10, 40}, 16, qw), Error);
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 / (v * v));
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
  y[2] = 0.0;
  CHECK(std::isnan(loglog_slope(x, y)));
}
