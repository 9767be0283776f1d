#pragma once

#include <stdexcept>
#include <string>

namespace poth {

/// Error categories surfaced by the library. The CLI maps each to an exit code.
enum class ErrorCategory { validation, unsupported, numerical, io };

const char* to_string(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Input violates a type invariant (bad dimensions, non-finite values, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCategory::validation, what) {}
};

/// The requested computation needs joint ranking information the source lacks.
class UnsupportedSourceError : public Error {
 public:
  explicit UnsupportedSourceError(const std::string& what)
      : Error(ErrorCategory::unsupported, what) {}
};

/// Numerical failure: degenerate covariance, inconsistent scores, ...
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace poth
