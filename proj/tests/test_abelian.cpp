#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "holosim/abelian.hpp"
#include "oracles.hpp"

using namespace holosim;

namespace {

std::vector<Eigen::Vector3d> loop_directions(const ParameterPath& path, std::size_t n) {
  std::vector<Eigen::Vector3d> d;
  for (double s : path.sample_positions(n)) d.emplace_back(path(s).head<3>());
  return d;
}

StateChain random_rephasing(const StateChain& chain, oracle::Gen& g) {
  std::vector<StateVector> states;
  for (const auto& s : chain.states()) states.push_back(s.rephased(g.uniform(-10.0, 10.0)));
  return StateChain(states, chain.closed());
}

}  // namespace

TEST_CASE("ground band phase is minus half the enclosed solid angle") {
  for (double theta0 : {oracle::pi / 6, oracle::pi / 3, oracle::pi / 2, 2 * oracle::pi / 3}) {
    const ParameterPath loop = make_azimuthal_loop(theta0);
    const double phase = discrete_geometric_phase(eigenstate_chain(qubit_model(), 0, loop, 4096)).phase;
    CHECK(std::abs(wrap_angle(phase + oracle::cap_solid_angle(theta0) / 2)) < 1e-4);
    const double upper = discrete_geometric_phase(eigenstate_chain(qubit_model(), 1, loop, 4096)).phase;
    CHECK(std::abs(wrap_angle(upper - oracle::cap_solid_angle(theta0) / 2)) < 1e-4);
    // polygon identity holds exactly at every resolution
    for (std::size_t n : {5u, 37u, 256u}) {
      const double p = discrete_geometric_phase(eigenstate_chain(qubit_model(), 0, loop, n)).phase;
      CHECK(std::abs(wrap_angle(p + solid_angle(loop_directions(loop, n)) / 2)) < 1e-12);
    }
  }
}

TEST_CASE("phase error falls at least quadratically with resolution") {
  const ParameterPath loop = make_azimuthal_loop(oracle::pi / 3);
  const double target = -oracle::cap_solid_angle(oracle::pi / 3) / 2;
  double previous = INFINITY;
  for (std::size_t n : {64u, 256u, 1024u, 4096u}) {
    const double err = std::abs(wrap_angle(discrete_geometric_phase(eigenstate_chain(qubit_model(), 0, loop, n)).phase - target));
    CHECK(err <= previous / 16.0 * 1.01);
    previous = err;
  }
}

TEST_CASE("small loops have vanishing phase") {
  const double phase = discrete_geometric_phase(eigenstate_chain(qubit_model(), 0, make_azimuthal_loop(1e-4), 512)).phase;
  CHECK(std::abs(phase) < 1e-7);
  const double flat = discrete_geometric_phase(
      eigenstate_chain(qubit_model(), 0, make_constant_path(ParameterPoint(Eigen::Vector3d(0.1, 0.2, 0.3))), 64)).phase;
  CHECK(flat == 0.0);
}

TEST_CASE("solid angle against independent oracles") {
  for (double theta0 : {0.2, 1.0, 2.0, 3.0}) {
    const double omega = solid_angle(loop_directions(make_azimuthal_loop(theta0), 1 << 15));
    CHECK(std::abs(wrap_angle(omega - oracle::cap_solid_angle(theta0))) < 1e-7);
  }
  oracle::Gen g(21);
  for (int k = 0; k < 100; ++k) {
    // small triangle around a random centre, counter-clockwise seen from outside
    const Eigen::Vector3d c = g.direction();
    const Eigen::Vector3d u = c.unitOrthogonal(), w = c.cross(u);
    const double r = g.uniform(0.05, 0.8);
    std::vector<Eigen::Vector3d> tri;
    for (int j = 0; j < 3; ++j) {
      const double a = 2 * oracle::pi * j / 3 + g.uniform(-0.3, 0.3);
      tri.push_back((c + r * (std::cos(a) * u + std::sin(a) * w)).normalized());
    }
    CHECK(solid_angle(tri) == doctest::Approx(oracle::girard_area(tri)).epsilon(1e-10));
    std::reverse(tri.begin(), tri.end());
    CHECK(solid_angle(tri) == doctest::Approx(-oracle::girard_area(tri)).epsilon(1e-10));
  }
}

TEST_CASE("octant triple") {
  const std::vector<Eigen::Vector3d> dirs{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
  std::vector<StateVector> ground, aligned;
  for (const auto& d : dirs) {
    ground.push_back(qubit_ground_state(d));
    aligned.push_back(bloch_state(d));
  }
  CHECK(std::abs(pancharatnam_phase(StateChain(ground, true)) + oracle::pi / 4) < 1e-12);
  CHECK(std::abs(pancharatnam_phase(StateChain(aligned, true)) - oracle::pi / 4) < 1e-12);
  CHECK(std::abs(solid_angle(dirs) - oracle::pi / 2) < 1e-12);
  CHECK(std::abs(oracle::girard_area(dirs) - oracle::pi / 2) < 1e-12);
}

TEST_CASE("collinear states and degenerate chains") {
  const Eigen::Vector3d d(0.3, 0.4, 0.5);
  std::vector<StateVector> same{bloch_state(d), bloch_state(d).rephased(1.0), bloch_state(d).rephased(-2.0)};
  CHECK(std::abs(pancharatnam_phase(StateChain(same, true))) < 1e-15);
  std::vector<StateVector> two{bloch_state(d), bloch_state(-d)};
  CHECK_THROWS_AS(pancharatnam_phase(StateChain(two, true)), Error);
  std::vector<StateVector> orth{bloch_state({0, 0, 1}), bloch_state({0, 0, -1}), bloch_state({1, 0, 0})};
  try {
    pancharatnam_phase(StateChain(orth, true));
    FAIL("expected an overlap error");
  } catch (const OverlapError& e) {
    CHECK(e.index() == 0);
  }
}

TEST_CASE("gauge invariance of Abelian phases") {
  oracle::Gen g(22);
  const StateChain chain = eigenstate_chain(qubit_model(), 0, make_azimuthal_loop(1.1), 97);
  const double base = discrete_geometric_phase(chain).phase;
  for (int k = 0; k < 100; ++k) {
    CHECK(std::abs(wrap_angle(discrete_geometric_phase(random_rephasing(chain, g)).phase - base)) < 1e-12);
  }
  // random states in dimension 4
  std::vector<StateVector> states;
  for (int j = 0; j < 6; ++j) {
    ComplexVector v(4);
    for (int c = 0; c < 4; ++c) v(c) = Complex(g.normal(), g.normal());
    states.emplace_back(v);
  }
  const StateChain random_chain(states, true);
  const double p = pancharatnam_phase(random_chain);
  for (int k = 0; k < 100; ++k) CHECK(std::abs(wrap_angle(pancharatnam_phase(random_rephasing(random_chain, g)) - p)) < 1e-12);
}

TEST_CASE("loop reversal negates Abelian phases") {
  for (double theta0 : {0.4, 1.3, 2.5}) {
    const ParameterPath loop = make_azimuthal_loop(theta0);
    const double fwd = discrete_geometric_phase(eigenstate_chain(qubit_model(), 0, loop, 300)).phase;
    const double bwd = discrete_geometric_phase(eigenstate_chain(qubit_model(), 0, loop.reversed(), 300)).phase;
    CHECK(std::abs(wrap_angle(fwd + bwd)) < 1e-12);
    const StateChain chain = eigenstate_chain(qubit_model(), 0, loop, 300);
    CHECK(std::abs(wrap_angle(discrete_geometric_phase(chain.reversed()).phase + fwd)) < 1e-12);
    const double cw = discrete_geometric_phase(eigenstate_chain(qubit_model(), 0, make_azimuthal_loop(theta0, 1.0, -1), 300)).phase;
    CHECK(std::abs(wrap_angle(cw + fwd)) < 1e-12);
  }
}

TEST_CASE("parallel transport") {
  const StateChain chain = eigenstate_chain(qubit_model(), 0, make_azimuthal_loop(0.9), 200);
  const ParallelTransport t = parallel_transport(chain);
  for (std::size_t k = 0; k + 1 < t.chain.size(); ++k) {
    const Complex o = t.chain[k].overlap(t.chain[k + 1]);
    CHECK(std::abs(o.imag()) < 1e-14);
    CHECK(o.real() > 0.0);
  }
  CHECK(std::abs(wrap_angle(t.closure_phase - discrete_geometric_phase(chain).phase)) < 1e-12);
}

TEST_CASE("finite-difference connection") {
  const StateField aligned = [](const ParameterPoint& l) {
    return bloch_state(Eigen::Vector3d(std::sin(l(0)) * std::cos(l(1)), std::sin(l(0)) * std::sin(l(1)), std::cos(l(0))));
  };
  for (double theta : {0.3, 1.2, 2.4}) {
    const double a = berry_connection_fd(aligned, ParameterPoint(Eigen::Vector2d(theta, 0.7)), 1, 1e-5);
    CHECK(a == doctest::Approx(oracle::bloch_connection_phi(theta)).epsilon(1e-8));
    // loop integral of the connection is minus the discrete phase
    const ParameterPath loop = make_azimuthal_loop(theta);
    std::vector<StateVector> states;
    for (double s : loop.sample_positions(512)) states.push_back(bloch_state(loop(s).head<3>()));
    const double phase = discrete_geometric_phase(StateChain(states, true)).phase;
    CHECK(std::abs(wrap_angle(2 * oracle::pi * a + phase)) < 1e-4);
  }
  CHECK_THROWS_AS(band_state(qubit_model(), 0, ParameterPoint(Eigen::Vector3d::Zero())), GapClosureError);
}

TEST_CASE("plaquette curvature and Stokes tiling") {
  const HamiltonianModel sphere = qubit_sphere_model();
  for (double theta : {0.4, 1.5, 2.7}) {
    const CurvatureSample c = berry_curvature_plaquette(sphere, 0, ParameterPoint(Eigen::Vector2d(theta, 0.3)), {0, 1}, 1e-3);
    CHECK(c.value / std::sin(theta) == doctest::Approx(-0.5).epsilon(1e-5));
  }
  oracle::Gen g(23);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Vector2d origin(g.uniform(0.2, 1.5), g.uniform(-3, 3));
    const auto nx = static_cast<std::size_t>(g.integer(1, 12)), ny = static_cast<std::size_t>(g.integer(1, 12));
    const PlaquetteTiling t = tile_plaquettes(sphere, 0, origin, {0, 1}, nx, ny, g.uniform(0.01, 0.1), g.uniform(0.01, 0.3));
    CHECK(t.cell_phases.size() == nx * ny);
    CHECK(std::abs(wrap_angle(t.flux - t.boundary_phase)) < 1e-10);
  }
}
