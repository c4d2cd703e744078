#include <charconv>
#include <cmath>
#include <sstream>

#include "holosim/experiments.hpp"

namespace holosim {

const char* tool_version() { return HOLOSIM_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

bool ExperimentReport::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::vector<std::string> ExperimentReport::failed_checks() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CellWriter {
  std::string operator()(double v) const { return format_double(v); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(const std::string& v) const { return csv_field(v); }
};

}  // namespace

std::string ExperimentReport::csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_field(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << std::visit(CellWriter{}, row[i]);
    out << '\n';
  }
  return out.str();
}

Json ExperimentReport::metadata() const {
  Json checks_json = Json::array();
  for (const auto& c : checks) {
    // JSON has no NaN/inf; non-finite values are written as null
    Json value = std::isfinite(c.value) ? Json(c.value) : Json(nullptr);
    Json bound = std::isfinite(c.bound) ? Json(c.bound) : Json(nullptr);
    checks_json.push_back({{"name", c.name}, {"pass", c.pass}, {"value", value}, {"bound", bound}});
  }
  return {{"experiment", experiment},
          {"config", config},
          {"tool_version", tool_version()},
          {"elapsed_ms", elapsed_ms},
          {"checks", checks_json}};
}

}  // namespace holosim
