#include "holosim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>

#include "holosim/abelian.hpp"
#include "holosim/adiabatic.hpp"
#include "holosim/holonomy.hpp"
#include "holosim/parallel.hpp"

namespace holosim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Hard-check thresholds.
constexpr double kBerryFinalError = 1e-4;
constexpr double kPolygonIdentity = 1e-9;
constexpr double kStokesIdentity = 1e-10;
constexpr double kCurvatureMean = 1e-3;
constexpr double kEtaAgreement = 1e-6;
constexpr double kUsbDistance = 1e-3;
constexpr double kUnitarity = 1e-8;
constexpr double kNormDrift = 1e-8;
constexpr double kSweepSlopeLow = -1.5;
constexpr double kSweepSlopeHigh = -0.5;
constexpr double kNoiseSlope = 1.5;
constexpr double kPancharatnamCrossCheck = 1e-6;

const std::map<std::string, std::vector<std::string>>& column_table() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"berry-qubit", {"samples", "phase", "polygon_oracle", "loop_oracle", "abs_error"}},
      {"curvature-map", {"kind", "x", "y", "curvature", "normalized", "flagged"}},
      {"usb-holonomy",
       {"samples", "eta_angle", "eta_line", "distance", "unitarity_defect", "raw_unitarity_defect"}},
      {"adiabatic-sweep", {"total_time", "steps", "distance", "unstripped_distance", "leakage"}},
      {"noise-study",
       {"epsilon", "realizations", "discarded", "mean_abs_projected", "std_projected", "mean_abs_raw",
        "std_raw"}},
      {"pancharatnam", {"states", "phase", "solid_angle", "oracle", "abs_error"}},
  };
  return table;
}

std::size_t as_count(ConfigReader& r, const std::string& key, std::int64_t fallback, std::int64_t minimum) {
  const std::int64_t v = r.integer(key, fallback);
  if (v < minimum) throw ConfigError(r.field(key), "must be at least " + std::to_string(minimum));
  return static_cast<std::size_t>(v);
}

std::string model_name(ConfigReader& root, const std::vector<std::string>& allowed, const std::string& fallback) {
  const std::string name = root.text("model", fallback);
  if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError(root.field("model"), "unsupported model '" + name + "' (allowed: " + list + ")");
  }
  return name;
}

// Path for the (n_x, n_y, n_z) qubit model.
ParameterPath qubit_path(ConfigReader& path_cfg) {
  const std::string family = path_cfg.text("family", "azimuthal");
  ConfigReader params = path_cfg.child("params");
  if (family == "azimuthal") {
    const double theta0 = params.number("theta0", kPi / 3.0);
    const double radius = params.number("radius", 1.0);
    const std::int64_t orientation = params.integer("orientation", 1);
    if (!(theta0 > 0.0 && theta0 < kPi)) throw ConfigError(params.field("theta0"), "must lie in (0, pi)");
    if (!(radius > 0.0)) throw ConfigError(params.field("radius"), "must be positive");
    if (orientation != 1 && orientation != -1) throw ConfigError(params.field("orientation"), "must be +1 or -1");
    return make_azimuthal_loop(theta0, radius, static_cast<int>(orientation));
  }
  if (family == "constant") {
    const auto p = params.numbers("point", {0.0, 0.0, 1.0});
    if (p.size() != 3) throw ConfigError(params.field("point"), "expected three components");
    return make_constant_path(ParameterPoint(Eigen::Vector3d(p[0], p[1], p[2])));
  }
  throw ConfigError(path_cfg.field("family"), "unknown qubit path family '" + family + "'");
}

ParameterPath usb_path(ConfigReader& path_cfg) {
  const std::string family = path_cfg.text("family", "circle");
  ConfigReader params = path_cfg.child("params");
  try {
    if (family == "circle") {
      UsbCircleLoop loop;
      loop.stokes_offset = params.number("stokes_offset", kDefaultUsbLoop.stokes_offset);
      loop.radius = params.number("radius", kDefaultUsbLoop.radius);
      loop.control_offset = params.number("control_offset", kDefaultUsbLoop.control_offset);
      loop.control_amplitude = params.number("control_amplitude", kDefaultUsbLoop.control_amplitude);
      return make_usb_loop(loop);
    }
    if (family == "constant") {
      UsbParameters p;
      p.pump = params.number("pump", 0.0);
      p.stokes = params.number("stokes", 1.0);
      p.control = params.number("control", 0.0);
      return make_usb_constant_loop(p);
    }
  } catch (const DarkFrameError& e) {
    throw ConfigError(path_cfg.field("params"), e.what());
  }
  throw ConfigError(path_cfg.field("family"), "unknown usb path family '" + family + "'");
}

ExperimentReport make_report(const std::string& name, Json resolved) {
  ExperimentReport r;
  r.experiment = name;
  r.columns = experiment_columns(name);
  r.config = std::move(resolved);
  return r;
}

double signed_band_factor(std::int64_t band) { return band == 0 ? -0.5 : 0.5; }

// mt19937_64 output is fixed by the standard; std::normal_distribution is not,
// so normals are drawn with Box-Muller to keep runs reproducible everywhere.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"berry-qubit",     "curvature-map", "usb-holonomy",
                                              "adiabatic-sweep", "noise-study",   "pancharatnam"};
  return names;
}

const std::vector<std::string>& experiment_columns(const std::string& experiment) {
  const auto& table = column_table();
  const auto it = table.find(experiment);
  if (it == table.end()) throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
  return it->second;
}

// ---------------------------------------------------------------------------

ExperimentReport run_berry_qubit(const Json& config) {
  Json resolved = config;
  ConfigReader root(resolved);
  model_name(root, {"qubit"}, "qubit");
  const std::int64_t band = root.integer("band", 0);
  if (band != 0 && band != 1) throw ConfigError(root.field("band"), "qubit band must be 0 or 1");
  ConfigReader path_cfg = root.child("path");
  const ParameterPath path = qubit_path(path_cfg);
  const std::size_t samples = as_count(path_cfg, "samples", 4096, 16);
  std::vector<double> ladder_default;
  for (std::size_t div : {64, 16, 4, 1}) ladder_default.push_back(static_cast<double>(std::max<std::size_t>(16, samples / div)));
  const auto ladder = root.numbers("resolutions", ladder_default);
  const std::size_t oracle_samples = as_count(root, "oracle_samples", 1 << 16, 16);

  const HamiltonianModel model = qubit_model();
  auto directions = [&](std::size_t n) {
    std::vector<Eigen::Vector3d> d;
    for (double s : path.sample_positions(n)) d.emplace_back(path(s).head<3>());
    return d;
  };
  const double factor = signed_band_factor(band);
  const double loop_oracle = wrap_angle(factor * solid_angle(directions(oracle_samples)));

  ExperimentReport report = make_report("berry-qubit", resolved);
  double worst_polygon = 0.0, final_error = 0.0;
  for (double rung : ladder) {
    if (!(rung >= 3.0)) throw ConfigError(root.field("resolutions"), "every resolution must be >= 3");
    const auto n = static_cast<std::size_t>(rung);
    const double phase = discrete_geometric_phase(eigenstate_chain(model, band, path, n)).phase;
    const double polygon = wrap_angle(factor * solid_angle(directions(n)));
    final_error = std::abs(wrap_angle(phase - loop_oracle));
    worst_polygon = std::max(worst_polygon, std::abs(wrap_angle(phase - polygon)));
    report.rows.push_back({static_cast<std::int64_t>(n), phase, polygon, loop_oracle, final_error});
  }
  report.checks.push_back({"final_error_vs_solid_angle", final_error < kBerryFinalError, final_error, kBerryFinalError});
  report.checks.push_back({"polygon_identity", worst_polygon < kPolygonIdentity, worst_polygon, kPolygonIdentity});
  return report;
}

ExperimentReport run_curvature_map(const Json& config) {
  Json resolved = config;
  ConfigReader root(resolved);
  const std::string name = model_name(root, {"qubit-sphere", "qubit-real"}, "qubit-sphere");
  const std::int64_t band = root.integer("band", 0);
  if (band != 0 && band != 1) throw ConfigError(root.field("band"), "qubit band must be 0 or 1");
  const bool sphere = name == "qubit-sphere";
  const double radius = sphere ? root.number("radius", 1.0) : 1.0;
  ConfigReader grid = root.child("grid");
  const auto origin = grid.numbers("origin", sphere ? std::vector<double>{0.3, 0.0} : std::vector<double>{0.5, 0.5});
  const auto extent = grid.numbers("extent", sphere ? std::vector<double>{kPi - 0.6, kTwoPi} : std::vector<double>{1.0, 1.0});
  const auto cells = grid.numbers("cells", {20.0, 20.0});
  if (origin.size() != 2) throw ConfigError(grid.field("origin"), "expected two components");
  if (extent.size() != 2 || !(extent[0] > 0.0) || !(extent[1] > 0.0))
    throw ConfigError(grid.field("extent"), "expected two positive components");
  if (cells.size() != 2 || !(cells[0] >= 1.0) || !(cells[1] >= 1.0))
    throw ConfigError(grid.field("cells"), "expected two counts >= 1");
  const double plaquette = root.number("plaquette", 1e-3);
  if (!(plaquette > 0.0)) throw ConfigError(root.field("plaquette"), "must be positive");
  const std::string normalize = root.text("normalize", sphere ? "sphere" : "none");
  if (normalize != "sphere" && normalize != "none")
    throw ConfigError(root.field("normalize"), "expected 'sphere' or 'none'");
  std::optional<double> expected;
  if (sphere || root.has("expect_normalized"))
    expected = root.number("expect_normalized", signed_band_factor(band));

  const HamiltonianModel model = sphere ? qubit_sphere_model(radius) : qubit_real_model();
  const auto nx = static_cast<std::size_t>(cells[0]);
  const auto ny = static_cast<std::size_t>(cells[1]);
  const double hx = extent[0] / static_cast<double>(nx), hy = extent[1] / static_cast<double>(ny);

  struct CellResult {
    double x, y, value = std::numeric_limits<double>::quiet_NaN(), normalized = std::numeric_limits<double>::quiet_NaN();
    bool flagged = false;
  };
  std::vector<CellResult> results(nx * ny);
  parallel_for(results.size(), [&](std::size_t k) {
    CellResult& c = results[k];
    c.x = origin[0] + (static_cast<double>(k % nx) + 0.5) * hx;
    c.y = origin[1] + (static_cast<double>(k / nx) + 0.5) * hy;
    try {
      const CurvatureSample s = berry_curvature_plaquette(model, band, Eigen::Vector2d(c.x, c.y), {0, 1}, plaquette);
      c.value = s.value;
      c.normalized = normalize == "sphere" ? s.value / (radius * radius * std::sin(c.x)) : s.value;
    } catch (const Error&) {
      c.flagged = true;
    }
  });

  ExperimentReport report = make_report("curvature-map", resolved);
  std::size_t flagged = 0;
  double sum = 0.0;
  for (const auto& c : results) {
    report.rows.push_back({std::string("cell"), c.x, c.y, c.value, c.normalized, static_cast<std::int64_t>(c.flagged)});
    if (c.flagged)
      ++flagged;
    else
      sum += c.normalized;
  }

  // Stokes row: curvature column carries the summed cell flux, normalized
  // column the boundary loop phase.
  const double cx = origin[0] + 0.5 * extent[0], cy = origin[1] + 0.5 * extent[1];
  try {
    const PlaquetteTiling t = tile_plaquettes(model, band, Eigen::Vector2d(origin[0], origin[1]), {0, 1}, nx, ny, hx, hy);
    const double mismatch = std::abs(wrap_angle(t.flux - t.boundary_phase));
    report.rows.push_back({std::string("stokes"), cx, cy, t.flux, t.boundary_phase, std::int64_t{0}});
    report.checks.push_back({"stokes_identity", mismatch < kStokesIdentity, mismatch, kStokesIdentity});
  } catch (const Error&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.rows.push_back({std::string("stokes"), cx, cy, nan, nan, std::int64_t{1}});
  }
  report.checks.push_back({"no_degenerate_cells", flagged == 0, static_cast<double>(flagged), 0.0});
  if (expected && flagged < results.size()) {
    const double mean = sum / static_cast<double>(results.size() - flagged);
    const double dev = std::abs(mean - *expected);
    report.checks.push_back({"mean_normalized_curvature", dev < kCurvatureMean, mean, *expected});
  }
  return report;
}

ExperimentReport run_usb_holonomy(const Json& config) {
  Json resolved = config;
  ConfigReader root(resolved);
  model_name(root, {"usb"}, "usb");
  ConfigReader path_cfg = root.child("path");
  const ParameterPath loop = usb_path(path_cfg);
  const std::size_t samples = as_count(path_cfg, "samples", 8192, 16);
  const std::size_t eta_samples = as_count(root, "eta_samples", 1 << 14, 16);
  std::vector<double> ladder_default;
  for (std::size_t div : {16, 4, 1}) ladder_default.push_back(static_cast<double>(std::max<std::size_t>(16, samples / div)));
  const auto ladder = root.numbers("resolutions", ladder_default);

  const EtaEstimate eta_ref = usb_eta(loop, eta_samples);
  const ComplexMatrix closed_form = usb_holonomy_closed_form(eta_ref.value()).cast<Complex>();

  ExperimentReport report = make_report("usb-holonomy", resolved);
  double distance = 0.0, defect = 0.0;
  for (double rung : ladder) {
    if (!(rung >= 16.0)) throw ConfigError(root.field("resolutions"), "every resolution must be >= 16");
    const auto n = static_cast<std::size_t>(rung);
    const HolonomyResult h = usb_wilson_line(loop, n);
    const EtaEstimate eta = usb_eta(loop, n);
    distance = holonomy_distance(h.matrix, closed_form);
    defect = h.unitarity_defect;
    report.rows.push_back({static_cast<std::int64_t>(n), eta.angle_form, eta.line_form.value_or(std::nan("")),
                           distance, h.unitarity_defect, h.raw_unitarity_defect});
  }
  report.checks.push_back({"eta_quadratures_agree", eta_ref.discrepancy() < kEtaAgreement, eta_ref.discrepancy(), kEtaAgreement});
  report.checks.push_back({"wilson_line_matches_closed_form", distance < kUsbDistance, distance, kUsbDistance});
  report.checks.push_back({"unitarity", defect < kUnitarity, defect, kUnitarity});
  return report;
}

ExperimentReport run_adiabatic_sweep(const Json& config) {
  Json resolved = config;
  ConfigReader root(resolved);
  const std::string name = model_name(root, {"usb", "qubit"}, "usb");
  const bool usb = name == "usb";
  ConfigReader path_cfg = root.child("path");
  const ParameterPath loop = usb ? usb_path(path_cfg) : qubit_path(path_cfg);
  const std::size_t wilson_samples = as_count(path_cfg, "samples", 8192, 16);
  ConfigReader adiabatic = root.child("adiabatic");
  const auto times = adiabatic.numbers("times", {50.0, 200.0, 800.0});
  const double steps_per_unit = adiabatic.number("steps_per_unit_time", 16.0);
  const std::string stepper_name = adiabatic.text("stepper", "magnus4");
  if (stepper_name != "magnus4" && stepper_name != "midpoint")
    throw ConfigError(adiabatic.field("stepper"), "expected 'magnus4' or 'midpoint'");
  if (times.size() < 3) throw ConfigError(adiabatic.field("times"), "need at least three total times");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (!(times[k] > 0.0) || (k > 0 && !(times[k] > times[k - 1])))
      throw ConfigError(adiabatic.field("times"), "total times must be positive and ascending");
  if (!(steps_per_unit > 0.0)) throw ConfigError(adiabatic.field("steps_per_unit_time"), "must be positive");
  const Stepper stepper = stepper_name == "midpoint" ? Stepper::midpoint : Stepper::magnus4;

  BandBlock block = usb ? kUsbDarkBlock : BandBlock{0, 1};
  if (!usb) block.first = root.integer("band", 0);
  const HamiltonianModel model = usb ? usb_model() : qubit_model();
  std::optional<ComplexMatrix> frame;
  if (usb) frame = usb_basepoint_frame(loop);
  const ComplexMatrix prediction = wilson_line(eigenframe_path(model, loop, block, wilson_samples, frame)).matrix;
  const SweepTable table = convergence_sweep(model, loop, block, times, steps_per_unit, prediction, frame, stepper);

  ExperimentReport report = make_report("adiabatic-sweep", resolved);
  double max_distance = 0.0;
  bool strictly_decreasing = true, leakage_monotone = true;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const SweepRow& r = table.rows[k];
    report.rows.push_back({r.total_time, static_cast<std::int64_t>(r.steps), r.distance, r.unstripped_distance, r.leakage});
    max_distance = std::max(max_distance, r.distance);
    if (k > 0) {
      strictly_decreasing = strictly_decreasing && r.distance < table.rows[k - 1].distance;
      leakage_monotone = leakage_monotone && r.leakage <= table.rows[k - 1].leakage;
    }
  }
  if (max_distance < 1e-12) {
    report.checks.push_back({"trivial_loop_zero_distance", true, max_distance, 1e-12});
  } else {
    report.checks.push_back({"distance_strictly_decreasing", strictly_decreasing, table.rows.back().distance,
                             table.rows.front().distance});
    const bool slope_ok = table.slope >= kSweepSlopeLow && table.slope <= kSweepSlopeHigh;
    report.checks.push_back({"loglog_slope_in_range", slope_ok, table.slope, kSweepSlopeHigh});
  }
  // Qubit leakage oscillates with T (finite-time Rabi-like ripple), so it is
  // reported without a bound there.
  if (usb)
    report.checks.push_back({"leakage_monotone", leakage_monotone, table.rows.back().leakage, table.rows.front().leakage});
  return report;
}

namespace {

struct LoopNoise {
  std::vector<double> theta_cos, theta_sin, phi_cos, phi_sin;  // theta_cos[0] is the zero mode
};

LoopNoise draw_noise(std::uint64_t seed, std::size_t realization, std::size_t modes) {
  NormalStream rng(splitmix64(seed ^ splitmix64(realization)));
  LoopNoise n;
  n.theta_cos.resize(modes + 1);
  n.theta_sin.resize(modes + 1, 0.0);
  n.phi_cos.resize(modes + 1, 0.0);
  n.phi_sin.resize(modes + 1, 0.0);
  n.theta_cos[0] = rng.next();
  for (std::size_t m = 1; m <= modes; ++m) {
    n.theta_cos[m] = rng.next();
    n.theta_sin[m] = rng.next();
    n.phi_cos[m] = rng.next();
    n.phi_sin[m] = rng.next();
  }
  return n;
}

// Azimuthal loop deformed by low-order Fourier modes of amplitude eps in the
// polar and azimuthal angles. Dropping the polar zero mode removes the
// first-order change of enclosed area (area-preserving projection).
ParameterPath perturbed_loop(double theta0, double radius, int orientation, double eps, const LoopNoise& noise,
                             bool area_preserving) {
  const std::size_t modes = noise.theta_cos.size() - 1;
  const double norm = 1.0 / std::sqrt(static_cast<double>(2 * modes + 1));
  return ParameterPath("perturbed azimuthal", 3, true, [=](double s) {
    double dtheta = area_preserving ? 0.0 : noise.theta_cos[0];
    double dphi = 0.0;
    for (std::size_t m = 1; m <= modes; ++m) {
      const double c = std::cos(kTwoPi * static_cast<double>(m) * s), sn = std::sin(kTwoPi * static_cast<double>(m) * s);
      dtheta += noise.theta_cos[m] * c + noise.theta_sin[m] * sn;
      dphi += noise.phi_cos[m] * c + noise.phi_sin[m] * sn;
    }
    const double theta = theta0 + eps * norm * dtheta;
    const double phi = orientation * kTwoPi * s + eps * norm * dphi;
    return ParameterPoint(radius * Eigen::Vector3d(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                                                   std::cos(theta)));
  });
}

}  // namespace

ExperimentReport run_noise_study(const Json& config) {
  Json resolved = config;
  ConfigReader root(resolved);
  model_name(root, {"qubit"}, "qubit");
  ConfigReader path_cfg = root.child("path");
  const std::string family = path_cfg.text("family", "azimuthal");
  if (family != "azimuthal") throw ConfigError(path_cfg.field("family"), "noise study supports the azimuthal loop only");
  ConfigReader params = path_cfg.child("params");
  const double theta0 = params.number("theta0", kPi / 3.0);
  const double radius = params.number("radius", 1.0);
  const std::int64_t orientation = params.integer("orientation", 1);
  if (!(theta0 > 0.0 && theta0 < kPi)) throw ConfigError(params.field("theta0"), "must lie in (0, pi)");
  if (!(radius > 0.0)) throw ConfigError(params.field("radius"), "must be positive");
  if (orientation != 1 && orientation != -1) throw ConfigError(params.field("orientation"), "must be +1 or -1");
  const std::size_t samples = as_count(path_cfg, "samples", 1024, 16);
  ConfigReader noise_cfg = root.child("noise");
  const auto amplitudes = noise_cfg.numbers("amplitudes", {0.0, 0.01, 0.02, 0.04});
  const std::size_t realizations = as_count(noise_cfg, "realizations", 16, 8);
  const std::int64_t seed = noise_cfg.integer("seed", 12345);
  const std::size_t modes = as_count(noise_cfg, "modes", 3, 1);
  for (std::size_t k = 0; k < amplitudes.size(); ++k)
    if (!(amplitudes[k] >= 0.0 && amplitudes[k] <= 0.2))
      throw ConfigError(noise_cfg.field("amplitudes") + "[" + std::to_string(k) + "]", "must lie in [0, 0.2]");

  const HamiltonianModel model = qubit_model();
  const int orient = static_cast<int>(orientation);
  std::vector<LoopNoise> draws(realizations);
  for (std::size_t r = 0; r < realizations; ++r) draws[r] = draw_noise(static_cast<std::uint64_t>(seed), r, modes);

  auto phase_of = [&](const ParameterPath& p) {
    return discrete_geometric_phase(eigenstate_chain(model, 0, p, samples)).phase;
  };
  const double base = phase_of(perturbed_loop(theta0, radius, orient, 0.0, draws[0], true));

  struct Outcome {
    bool kept = false;
    double projected = 0.0, raw = 0.0;
  };
  ExperimentReport report = make_report("noise-study", resolved);
  std::vector<double> eps_positive, dev_positive;
  bool zero_noise_ok = true;
  for (double eps : amplitudes) {
    std::vector<Outcome> out(realizations);
    parallel_for(realizations, [&](std::size_t r) {
      const ParameterPath projected = perturbed_loop(theta0, radius, orient, eps, draws[r], true);
      const ParameterPath raw = perturbed_loop(theta0, radius, orient, eps, draws[r], false);
      for (const ParameterPath* p : {&projected, &raw}) {
        for (double s : p->sample_positions(samples)) {
          const double t = QubitDirection{(*p)(s).head<3>()}.theta();
          if (!(t > 1e-6 && t < kPi - 1e-6)) return;  // left the valid domain: discarded
        }
      }
      out[r] = {true, wrap_angle(phase_of(projected) - base), wrap_angle(phase_of(raw) - base)};
    });

    std::size_t kept = 0;
    double mp = 0.0, mr = 0.0, sp = 0.0, sr = 0.0, mean_p = 0.0, mean_r = 0.0;
    for (const auto& o : out) {
      if (!o.kept) continue;
      ++kept;
      mp += std::abs(o.projected);
      mr += std::abs(o.raw);
      mean_p += o.projected;
      mean_r += o.raw;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (kept > 0) {
      const double k = static_cast<double>(kept);
      mp /= k;
      mr /= k;
      mean_p /= k;
      mean_r /= k;
      for (const auto& o : out) {
        if (!o.kept) continue;
        sp += (o.projected - mean_p) * (o.projected - mean_p);
        sr += (o.raw - mean_r) * (o.raw - mean_r);
      }
      sp = kept > 1 ? std::sqrt(sp / (k - 1.0)) : 0.0;
      sr = kept > 1 ? std::sqrt(sr / (k - 1.0)) : 0.0;
    } else {
      mp = mr = sp = sr = nan;
    }
    report.rows.push_back({eps, static_cast<std::int64_t>(kept), static_cast<std::int64_t>(realizations - kept), mp, sp,
                           mr, sr});
    if (eps == 0.0) zero_noise_ok = zero_noise_ok && mp == 0.0 && sp == 0.0 && mr == 0.0 && sr == 0.0;
    if (eps > 0.0 && kept > 0) {
      eps_positive.push_back(eps);
      dev_positive.push_back(mp);
    }
  }

  report.checks.push_back({"zero_noise_zero_deviation", zero_noise_ok, zero_noise_ok ? 0.0 : 1.0, 0.0});
  if (eps_positive.size() >= 2) {
    const double slope = loglog_slope(eps_positive, dev_positive);
    report.checks.push_back({"area_preserving_slope", slope >= kNoiseSlope, slope, kNoiseSlope});
  }
  return report;
}

ExperimentReport run_pancharatnam(const Json& config) {
  Json resolved = config;
  ConfigReader root(resolved);
  const std::string convention = root.text("bloch_convention", "ground");
  if (convention != "ground" && convention != "aligned")
    throw ConfigError(root.field("bloch_convention"), "expected 'ground' or 'aligned'");
  if (!root.has("states"))
    resolved["states"] = Json::array({{{"bloch", {0, 0, 1}}}, {{"bloch", {1, 0, 0}}}, {{"bloch", {0, 1, 0}}}});
  const Json& list = resolved["states"];
  if (!list.is_array() || list.size() < 3) throw ConfigError("states", "expected an array of at least three states");

  std::vector<StateVector> states;
  std::vector<Eigen::Vector3d> directions;
  bool all_bloch = true;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "states[" + std::to_string(i) + "]";
    const Json& s = list[i];
    if (s.contains("bloch")) {
      const Json& b = s["bloch"];
      if (!b.is_array() || b.size() != 3 || !b[0].is_number() || !b[1].is_number() || !b[2].is_number())
        throw ConfigError(at + ".bloch", "expected three numbers");
      const Eigen::Vector3d d(b[0].get<double>(), b[1].get<double>(), b[2].get<double>());
      if (!(d.norm() > 0.0)) throw ConfigError(at + ".bloch", "zero direction");
      directions.push_back(d);
      states.push_back(convention == "ground" ? qubit_ground_state(d) : bloch_state(d));
    } else if (s.contains("amplitudes")) {
      const Json& a = s["amplitudes"];
      if (!a.is_array() || a.empty()) throw ConfigError(at + ".amplitudes", "expected [[re, im], ...]");
      ComplexVector v(static_cast<Index>(a.size()));
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a[k].is_array() || a[k].size() != 2 || !a[k][0].is_number() || !a[k][1].is_number())
          throw ConfigError(at + ".amplitudes[" + std::to_string(k) + "]", "expected [re, im]");
        v(static_cast<Index>(k)) = Complex(a[k][0].get<double>(), a[k][1].get<double>());
      }
      if (!(v.norm() > 0.0)) throw ConfigError(at + ".amplitudes", "zero vector");
      states.emplace_back(std::move(v));
      all_bloch = false;
    } else {
      throw ConfigError(at, "expected a 'bloch' or 'amplitudes' entry");
    }
  }

  const double phase = pancharatnam_phase(StateChain(states, true));
  ExperimentReport report = make_report("pancharatnam", resolved);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (all_bloch) {
    const double omega = solid_angle(directions);
    const double oracle = wrap_angle((convention == "ground" ? -0.5 : 0.5) * omega);
    const double err = std::abs(wrap_angle(phase - oracle));
    report.rows.push_back({static_cast<std::int64_t>(states.size()), phase, omega, oracle, err});
    report.checks.push_back({"geodesic_cross_check", err < kPancharatnamCrossCheck, err, kPancharatnamCrossCheck});
  } else {
    report.rows.push_back({static_cast<std::int64_t>(states.size()), phase, nan, nan, nan});
  }
  return report;
}

ExperimentReport run_experiment(const std::string& experiment, const Json& config) {
  using Runner = ExperimentReport (*)(const Json&);
  static const std::map<std::string, Runner> runners{
      {"berry-qubit", run_berry_qubit},         {"curvature-map", run_curvature_map},
      {"usb-holonomy", run_usb_holonomy},       {"adiabatic-sweep", run_adiabatic_sweep},
      {"noise-study", run_noise_study},         {"pancharatnam", run_pancharatnam}};
  const auto it = runners.find(experiment);
  if (it == runners.end()) throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
  Json cfg = config.is_null() ? Json::object() : config;
  if (!cfg.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  cfg["experiment"] = experiment;
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report = it->second(cfg);
  report.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace holosim
