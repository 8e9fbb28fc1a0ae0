#pragma once

#include <stdexcept>
#include <string>

namespace tdslab {

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error("dimension error: " + msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error("numeric error: " + msg) {}
};

struct IndexError : std::runtime_error {
  explicit IndexError(const std::string& msg) : std::runtime_error("index error: " + msg) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error("format error: " + msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error("i/o error: " + msg) {}
};

struct UndefinedMetricError : std::runtime_error {
  explicit UndefinedMetricError(const std::string& msg)
      : std::runtime_error("undefined metric: " + msg) {}
};

}  // namespace tdslab
