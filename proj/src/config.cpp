#include <cmath>

#include "holosim/errors.hpp"
#include "holosim/experiments.hpp"

namespace holosim {

ConfigReader::ConfigReader(Json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (node_->is_null()) *node_ = Json::object();
  if (!node_->is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
}

std::string ConfigReader::field(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool ConfigReader::has(const std::string& key) const { return node_->contains(key); }

double ConfigReader::number(const std::string& key, double fallback) {
  if (!has(key)) (*node_)[key] = fallback;
  return number(key);
}

double ConfigReader::number(const std::string& key) {
  if (!has(key)) throw ConfigError(field(key), "required field is missing");
  const Json& v = (*node_)[key];
  if (!v.is_number()) throw ConfigError(field(key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(field(key), "expected a finite number");
  return d;
}

std::int64_t ConfigReader::integer(const std::string& key, std::int64_t fallback) {
  if (!has(key)) (*node_)[key] = fallback;
  const Json& v = (*node_)[key];
  if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
  return v.get<std::int64_t>();
}

std::string ConfigReader::text(const std::string& key, const std::string& fallback) {
  if (!has(key)) (*node_)[key] = fallback;
  const Json& v = (*node_)[key];
  if (!v.is_string()) throw ConfigError(field(key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> ConfigReader::numbers(const std::string& key, const std::vector<double>& fallback) {
  if (!has(key)) (*node_)[key] = fallback;
  const Json& v = (*node_)[key];
  if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

ConfigReader ConfigReader::child(const std::string& key) {
  if (!has(key)) (*node_)[key] = Json::object();
  return ConfigReader((*node_)[key], field(key));
}

}  // namespace holosim
