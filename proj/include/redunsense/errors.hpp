#pragma once

#include <stdexcept>
#include <string>

namespace redunsense {

// Argument-range violations are reported with std::invalid_argument.
// The classes below cover the remaining failure kinds a caller may want to
// distinguish (the CLI maps them onto exit codes).

/// Malformed or invalid input file; the message names the offending field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mismatch draw produced a nonpositive component value. Re-seed and retry.
class DegenerateRealization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested code has no assembly in the component set.
class NoAssembly : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A size or memory guard was exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The selection strategy is not admissible for the component set.
class StrategyMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace redunsense
