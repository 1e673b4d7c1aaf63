#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lowrank {

/// Incompatible or out-of-range matrix dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that must be (numerically) invertible is singular.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factor required to have orthonormal columns does not.
class OrthonormalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The argument lies outside the neighborhood covered by the chart.
class NotInNeighborhoodError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A NaN or Inf entry appeared; `step` is the step index at which the
/// trajectory became non-finite (-1 when not produced by a time loop).
class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& what, std::int64_t step = -1)
      : std::runtime_error(what), step(step) {}
  std::int64_t step;
};

/// Invalid run configuration (bad key, bad combination, non-divisible dt...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two time grids share no comparable instants.
class GridMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lowrank
