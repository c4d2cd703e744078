#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace holosim {

// Base for every numerical or configuration failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HermiticityError : public Error {
 public:
  HermiticityError(const std::string& what, double defect) : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, double singular_value)
      : Error(what), singular_value_(singular_value) {}
  double singular_value() const noexcept { return singular_value_; }

 private:
  double singular_value_;
};

// Two consecutive states (or frames) are numerically orthogonal.
class OverlapError : public Error {
 public:
  OverlapError(const std::string& what, std::size_t index, double overlap)
      : Error(what), index_(index), overlap_(overlap) {}
  std::size_t index() const noexcept { return index_; }
  double overlap() const noexcept { return overlap_; }

 private:
  std::size_t index_;
  double overlap_;
};

// The tracked eigenvalue block touched the rest of the spectrum.
class GapClosureError : public Error {
 public:
  GapClosureError(const std::string& what, double s, double gap) : Error(what), s_(s), gap_(gap) {}
  double s() const noexcept { return s_; }
  double gap() const noexcept { return gap_; }

 private:
  double s_;
  double gap_;
};

// The dark-state angles of the four-level model are undefined (pump = stokes = 0).
class DarkFrameError : public Error {
 public:
  DarkFrameError(const std::string& what, double s) : Error(what), s_(s) {}
  double s() const noexcept { return s_; }

 private:
  double s_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace holosim
