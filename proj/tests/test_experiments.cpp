#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <charconv>

#include "doctest.h"
#include "holosim/errors.hpp"
#include "holosim/experiments.hpp"
#include "oracles.hpp"

using namespace holosim;

namespace {

const Check* find_check(const ExperimentReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string config_error_field(const std::string& experiment, const Json& config) {
  try {
    run_experiment(experiment, config);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("default runs pass their checks") {
  for (const std::string name : {"berry-qubit", "curvature-map", "usb-holonomy", "noise-study", "pancharatnam"}) {
    CAPTURE(name);
    const ExperimentReport r = run_experiment(name, Json::object());
    CHECK(r.passed());
    CHECK(r.columns == experiment_columns(name));
    for (const auto& row : r.rows) CHECK(row.size() == r.columns.size());
    CHECK(r.config["experiment"] == name);
  }
}

TEST_CASE("resolved config carries defaults") {
  const ExperimentReport r = run_experiment("berry-qubit", Json::object());
  CHECK(r.config["path"]["family"] == "azimuthal");
  CHECK(r.config["path"]["samples"] == 4096);
  CHECK(r.config["resolutions"].size() == 4);
  const Json meta = r.metadata();
  for (const char* key : {"config", "tool_version", "elapsed_ms", "checks"}) CHECK(meta.contains(key));
  CHECK(meta["tool_version"] == tool_version());
}

TEST_CASE("invalid configs name the offending field") {
  CHECK(config_error_field("nope", Json::object()) == "experiment");
  CHECK(config_error_field("berry-qubit", {{"path", {{"params", {{"theta0", 4.0}}}}}}) == "path.params.theta0");
  CHECK(config_error_field("berry-qubit", {{"path", {{"samples", "many"}}}}) == "path.samples");
  CHECK(config_error_field("noise-study", {{"noise", {{"amplitudes", {0.1, 0.5}}}}}) == "noise.amplitudes[1]");
  CHECK(config_error_field("noise-study", {{"noise", {{"realizations", 4}}}}) == "noise.realizations");
  CHECK(config_error_field("usb-holonomy", {{"path", {{"params", {{"stokes_offset", 1.0}}}}}}) == "path.params");
  CHECK(config_error_field("pancharatnam", {{"states", {{{"bloch", {0, 0, 1}}}, {{"spin", 1}}, {{"bloch", {1, 0, 0}}}}}}) ==
        "states[1]");
  CHECK(config_error_field("adiabatic-sweep", {{"adiabatic", {{"times", {50, 20, 80}}}}}) == "adiabatic.times");
  CHECK(config_error_field("curvature-map", {{"model", "usb"}}) == "model");
}

TEST_CASE("noise study is reproducible") {
  const Json cfg = {{"noise", {{"seed", 99}, {"realizations", 8}}}, {"path", {{"samples", 256}}}};
  const std::string a = run_experiment("noise-study", cfg).csv();
  const std::string b = run_experiment("noise-study", cfg).csv();
  CHECK(a == b);
  Json other = cfg;
  other["noise"]["seed"] = 100;
  CHECK(run_experiment("noise-study", other).csv() != a);
  const ExperimentReport r = run_experiment("noise-study", cfg);
  CHECK(std::get<double>(r.rows[0][3]) == 0.0);
  CHECK(std::get<double>(r.rows[0][4]) == 0.0);
}

TEST_CASE("four-level loop without control coupling") {
  const Json cfg = {{"path", {{"params", {{"control_offset", 0.0}, {"control_amplitude", 0.0}}}}}};
  const ExperimentReport r = run_experiment("usb-holonomy", cfg);
  CHECK(r.passed());
  CHECK(std::abs(std::get<double>(r.rows.back()[1])) < 1e-12);
  CHECK(std::get<double>(r.rows.back()[3]) < 1e-6);
}

TEST_CASE("constant loop sweep has zero distances") {
  const Json cfg = {{"path", {{"family", "constant"}}}};
  const ExperimentReport r = run_experiment("adiabatic-sweep", cfg);
  CHECK(r.passed());
  REQUIRE(find_check(r, "trivial_loop_zero_distance"));
}

TEST_CASE("curvature map flags degenerate cells") {
  const Json cfg = {{"model", "qubit-real"}, {"grid", {{"origin", {-0.5, -0.5}}, {"extent", {1.0, 1.0}}, {"cells", {2, 2}}}},
                    {"plaquette", 0.5}};
  const ExperimentReport r = run_experiment("curvature-map", cfg);
  const Check* c = find_check(r, "no_degenerate_cells");
  REQUIRE(c);
  CHECK_FALSE(c->pass);
  CHECK(std::get<std::string>(r.rows.back()[0]) == "stokes");
}

TEST_CASE("pancharatnam accepts raw amplitudes") {
  const double h = std::sqrt(0.5);
  const Json cfg = {{"states",
                     {{{"amplitudes", {{1, 0}, {0, 0}}}}, {{"amplitudes", {{h, 0}, {h, 0}}}}, {{"amplitudes", {{h, 0}, {0, h}}}}}}};
  const ExperimentReport r = run_experiment("pancharatnam", cfg);
  CHECK(std::abs(std::get<double>(r.rows[0][1]) - oracle::pi / 4) < 1e-12);
  CHECK(std::isnan(std::get<double>(r.rows[0][2])));
  CHECK(r.checks.empty());
  const ExperimentReport aligned = run_experiment("pancharatnam", {{"bloch_convention", "aligned"}});
  CHECK(std::abs(std::get<double>(aligned.rows[0][1]) - oracle::pi / 4) < 1e-12);
  CHECK(aligned.passed());
}

TEST_CASE("csv doubles round-trip") {
  oracle::Gen g(51);
  for (int k = 0; k < 1000; ++k) {
    const double v = g.normal() * std::pow(10.0, g.integer(-300, 300));
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
}
