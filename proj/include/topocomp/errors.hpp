#pragma once

#include <stdexcept>
#include <string>

namespace topocomp {

// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid field construction or an operation applied to an unsuitable field.
class FieldError : public Error {
 public:
  explicit FieldError(const std::string& msg) : Error(msg) {}
};

// A constraint set that cannot be realized on the given field.
class ConstraintError : public Error {
 public:
  explicit ConstraintError(const std::string& msg) : Error(msg) {}
};

// Archive encoding/decoding failures. Each failure mode is distinct.
class ArchiveError : public Error {
 public:
  enum class Kind {
    BadMagic,
    BadVersion,
    Truncated,
    ChecksumMismatch,
    BackendFailure,
    Corrupt,
    InvalidInput,
  };

  ArchiveError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Metric computations rejected by size guards or invalid parameters.
class MetricsError : public Error {
 public:
  explicit MetricsError(const std::string& msg) : Error(msg) {}
};

// An internal invariant did not hold. Indicates a bug, never user input.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& msg) : Error(msg) {}
};

}  // namespace topocomp
