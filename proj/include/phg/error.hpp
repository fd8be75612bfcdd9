#pragma once

#include <stdexcept>
#include <string>

namespace phg {

// Error categories map one-to-one onto CLI exit codes (see harness).
enum class ErrorKind {
  Input = 2,      // malformed files, invalid arguments, inconsistent models
  Numerical = 3,  // non-convergence, blow-up, solvability violations
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what),
        kind_(kind),
        module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

class InputError : public Error {
 public:
  InputError(std::string module, const std::string& what)
      : Error(ErrorKind::Input, std::move(module), what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(std::string module, const std::string& what)
      : Error(ErrorKind::Numerical, std::move(module), what) {}
};

// A kernel component of the right-hand side was not zero when solving
// (Δ_D + μ)c = d. Upstream this means a log correction is missing.
class SolvabilityViolation : public NumericalError {
 public:
  SolvabilityViolation(const std::string& what) : NumericalError("spectral", what) {}
};

}  // namespace phg
