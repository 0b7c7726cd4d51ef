#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairaudit {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A spec or parameter struct failed validation. `field()` names the offender.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A dataset lacks the records needed downstream (empty selection, thin
// (group, label) cells).
class DegenerateDatasetError : public Error {
 public:
  using Error::Error;
};

// The optimizer produced a non-finite objective.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A fairness metric has no value on the given data (empty conditioning cell).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data. `line()` is 1-based; 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Every trial of some dataset cell failed.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairaudit
