#pragma once

#include <stdexcept>
#include <string>

namespace wvsim {

/// A value violates a physical-realizability constraint (norm bounds,
/// positivity, trace, coupling range, ...).
class PhysicalityError : public std::runtime_error {
 public:
  explicit PhysicalityError(const std::string& what) : std::runtime_error(what) {}
};

/// The requested estimate is undefined for the given data (vanishing
/// overlap, zero success probability, all-discard counts).
class DegenerateEstimatorError : public std::runtime_error {
 public:
  explicit DegenerateEstimatorError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wvsim
