#pragma once

#include <stdexcept>
#include <string>

namespace dape {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kData = 3,
  kDivergence = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }
  const char* kind() const noexcept {
    switch (code_) {
      case ExitCode::kConfig: return "config_error";
      case ExitCode::kData: return "data_error";
      case ExitCode::kDivergence: return "numeric_divergence";
      default: return "error";
    }
  }

 private:
  ExitCode code_;
};

// Invalid configuration, arguments or preconditions on parameters.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::kConfig, what) {}
};

// Malformed, missing or inconsistent data (files, shapes, labels).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Non-finite loss or parameters during optimisation.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(ExitCode::kDivergence, what) {}
};

}  // namespace dape
