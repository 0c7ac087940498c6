#pragma once

#include <stdexcept>
#include <string>

namespace coolopt {

/// Invalid or inconsistent run configuration. CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Nonlinear or linear solve failure (diagnostics in the message). Exit code 3.
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure while reading or writing run artifacts. Exit code 4.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coolopt
