#pragma once

#include <stdexcept>
#include <string>

namespace floq {

// Error hierarchy maps onto the CLI exit codes:
//   ConfigError -> 2, CapacityError -> 3, ConsistencyError -> 4.

/// Invalid parameters or malformed configuration.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested problem size exceeds what the dense/state-vector paths support.
class CapacityError : public std::runtime_error {
  public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical self-check failed (unitarity, symmetry, completeness, ...).
class ConsistencyError : public std::runtime_error {
  public:
    explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An operator expected to commute with a symmetry does not.
class SymmetryViolationError : public ConsistencyError {
  public:
    SymmetryViolationError(const std::string& msg, double defect)
        : ConsistencyError(msg + " (defect " + std::to_string(defect) + ")"), defect_(defect) {}
    double defect() const { return defect_; }

  private:
    double defect_;
};

}  // namespace floq
