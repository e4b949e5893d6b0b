#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rashomon {

// Base of every error raised by the toolkit. `kind()` is the stable,
// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Malformed input text. `position` is a 1-based line number for model and
// config files and a 0-based character offset for property strings.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(message + " (at " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const noexcept { return position_; }
  const char* kind() const noexcept override { return "parse_error"; }

 private:
  std::size_t position_;
};

// Well-formed input that violates a model invariant.
class SemanticError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "semantic_error"; }
};

// A configurable state-space cap was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "resource_error"; }
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual)
      : Error(message + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }
  const char* kind() const noexcept override { return "convergence_error"; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

class MissingArtifactError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "missing_artifact"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io_error"; }
};

}  // namespace rashomon
