// holosim: command-line front end for the geometric phase experiments.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "holosim/errors.hpp"
#include "holosim/experiments.hpp"

namespace {

std::string column_help() {
  std::ostringstream out;
  out << "\nExperiments and their CSV columns:\n";
  for (const auto& name : holosim::experiment_names()) {
    out << "  " << name << ": ";
    const auto& cols = holosim::experiment_columns(name);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
  }
  out << "\nExit status: 0 all checks passed, 1 a check failed, 2 invalid input, 3 numerical error.\n";
  return out.str();
}

holosim::Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw holosim::ConfigError("--config", "cannot open '" + path + "'");
  try {
    return holosim::Json::parse(in);
  } catch (const holosim::Json::parse_error& e) {
    throw holosim::ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw holosim::Error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric phase and holonomy experiments"};
  app.footer(column_help());
  std::string experiment, config_path, out_prefix;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  app.add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(holosim::experiment_names()));
  app.add_option("--config", config_path, "JSON config file (defaults are used for absent fields)");
  app.add_option("--out", out_prefix, "Write <prefix>.csv and <prefix>.json instead of stdout/stderr");
  app.add_option("--seed", seed, "Override noise.seed");
  app.add_option("--samples", samples, "Override path.samples")->check(CLI::PositiveNumber);
  app.set_version_flag("--version", holosim::tool_version());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // --help and --version exit 0
  }

  try {
    holosim::Json config = config_path.empty() ? holosim::Json::object() : load_config(config_path);
    if (!config.is_object()) throw holosim::ConfigError("<root>", "config must be a JSON object");
    holosim::Json overrides = holosim::Json::object();
    if (seed) {
      config["noise"]["seed"] = *seed;
      overrides["noise.seed"] = *seed;
    }
    if (samples) {
      config["path"]["samples"] = *samples;
      overrides["path.samples"] = *samples;
    }

    holosim::ExperimentReport report = holosim::run_experiment(experiment, config);
    if (!overrides.empty()) report.config["cli_overrides"] = overrides;
    const std::string meta = report.metadata().dump(2) + "\n";
    if (out_prefix.empty()) {
      std::cout << report.csv();
      std::cerr << meta;
    } else {
      write_file(out_prefix + ".csv", report.csv());
      write_file(out_prefix + ".json", meta);
    }
    if (!report.passed()) {
      std::cerr << "failed checks:\n";
      for (const auto& c : report.checks)
        if (!c.pass)
          std::cerr << "  " << c.name << " (value " << holosim::format_double(c.value) << ", bound "
                    << holosim::format_double(c.bound) << ")\n";
      return 1;
    }
    return 0;
  } catch (const holosim::ConfigError& e) {
    std::cerr << "holosim: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "holosim: " << e.what() << '\n';
    return 3;
  }
}
