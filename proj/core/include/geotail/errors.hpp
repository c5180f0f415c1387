#pragma once

#include <stdexcept>
#include <string>

namespace geotail {

/// Base class for all geotail domain errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent configuration (rejected before any work starts).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A power-law fit could not be produced from the data.
class FitError : public Error {
 public:
  enum class Reason {
    kInsufficientTail,  // fewer than min_tail values >= 1
    kDegenerateTail,    // fewer than 2 distinct tail values
    kInvalidArgument,
  };

  FitError(Reason reason, const std::string& what) : Error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// A Hurst estimator could not run (short series, zero variance, no usable scales).
class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what) : Error(what) {}
};

/// Malformed input record; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(long line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace geotail
