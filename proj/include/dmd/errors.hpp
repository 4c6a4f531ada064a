#pragma once

#include <stdexcept>
#include <string>

namespace dmd {

// Raised when the simplex hits its pivot cap.
struct SolverLimitError : std::runtime_error {
  explicit SolverLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an exact enumeration would exceed desk scale.
struct ResourceLimitError : std::runtime_error {
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dmd
