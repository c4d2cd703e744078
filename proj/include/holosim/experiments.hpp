#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace holosim {

using Json = nlohmann::json;

struct Check {
  std::string name;
  bool pass;
  double value;
  double bound;
};

using Cell = std::variant<double, std::int64_t, std::string>;

// Tabular result of one experiment plus the metadata block.
struct ExperimentReport {
  std::string experiment;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json config;  // fully resolved, defaults filled in
  std::vector<Check> checks;
  std::int64_t elapsed_ms = 0;

  bool passed() const;
  std::vector<std::string> failed_checks() const;

  // UTF-8, header row, '.' decimal separator, shortest round-trip doubles.
  std::string csv() const;
  // {"config", "tool_version", "elapsed_ms", "checks"}
  Json metadata() const;
};

std::string format_double(double v);
const char* tool_version();

// Reads fields of a JSON config, filling defaults into a resolved copy and
// reporting errors with their dotted field path.
class ConfigReader {
 public:
  explicit ConfigReader(Json& node, std::string path = "");

  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  ConfigReader child(const std::string& key);
  bool has(const std::string& key) const;
  Json& node() noexcept { return *node_; }
  std::string field(const std::string& key) const;

 private:
  Json* node_;
  std::string path_;
};

// Experiment names accepted by run_experiment.
const std::vector<std::string>& experiment_names();
// Fixed CSV column set of each experiment.
const std::vector<std::string>& experiment_columns(const std::string& experiment);

ExperimentReport run_berry_qubit(const Json& config);
ExperimentReport run_curvature_map(const Json& config);
ExperimentReport run_usb_holonomy(const Json& config);
ExperimentReport run_adiabatic_sweep(const Json& config);
ExperimentReport run_noise_study(const Json& config);
ExperimentReport run_pancharatnam(const Json& config);

// Dispatches on the experiment name; unknown names raise ConfigError.
ExperimentReport run_experiment(const std::string& experiment, const Json& config);

}  // namespace holosim
