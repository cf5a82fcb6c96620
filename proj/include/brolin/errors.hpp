#pragma once

#include <stdexcept>
#include <string>

namespace brolin {

/// Broad failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorCategory { validation, numerical, io };

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), category_(category), kind_(std::move(kind)) {}

  ErrorCategory category() const noexcept { return category_; }
  /// Short machine-readable tag, e.g. "RootSolveFailure".
  const std::string& kind() const noexcept { return kind_; }

private:
  ErrorCategory category_;
  std::string kind_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what, std::string kind = "ValidationError")
      : Error(ErrorCategory::validation, std::move(kind), what) {}
};

class ParseError : public ValidationError {
public:
  explicit ParseError(const std::string& what) : ValidationError(what, "ParseError") {}
};

class NumericalError : public Error {
public:
  NumericalError(std::string kind, const std::string& what)
      : Error(ErrorCategory::numerical, std::move(kind), what) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, "IoError", what) {}
};

inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation: return 2;
    case ErrorCategory::numerical: return 3;
    case ErrorCategory::io: return 4;
  }
  return 1;
}

}  // namespace brolin
