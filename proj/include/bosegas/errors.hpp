#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bosegas {

/// Error families. The numeric values double as CLI exit codes.
enum class ErrorFamily : int {
  config = 2,      ///< invalid input, parse or validation failure
  resolution = 3,  ///< numerical resolution failure (quadrature, non-finite values)
  monitor = 4,     ///< a runtime invariant monitor was violated
};

class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), family_(family), kind_(std::move(kind)) {}

  ErrorFamily family() const noexcept { return family_; }
  /// Short machine-readable tag, e.g. "invalid-dimension" or "sonic".
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorFamily family_;
  std::string kind_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string kind, const std::string& what)
      : Error(ErrorFamily::config, std::move(kind), what) {}
};

class ResolutionError : public Error {
 public:
  ResolutionError(std::string kind, const std::string& what)
      : Error(ErrorFamily::resolution, std::move(kind), what) {}
};

class MonitorViolation : public Error {
 public:
  MonitorViolation(std::string kind, const std::string& what)
      : Error(ErrorFamily::monitor, std::move(kind), what) {}
};

}  // namespace bosegas
