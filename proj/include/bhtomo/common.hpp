#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bht {

inline constexpr double kPi = 3.14159265358979323846;

// Basis or matrix dimension exceeds a configured cap. CLI maps this to exit code 3.
class SizeCapError : public std::runtime_error {
public:
  SizeCapError(const std::string& msg, std::size_t dimension)
      : std::runtime_error(msg), dimension_(dimension) {}
  std::size_t dimension() const noexcept { return dimension_; }

private:
  std::size_t dimension_;
};

// Solver breakdown (non-convergence, branch jump, degeneracy). CLI maps this to exit code 4.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace bht
