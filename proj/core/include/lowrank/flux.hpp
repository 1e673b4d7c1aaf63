#pragma once

#include <functional>

#include "lowrank/state.hpp"

namespace lowrank {

/// Right-hand side F(Z, t) of the matrix ODE dZ/dt = F(Z, t).
///
/// In increment mode, eval(z, t) returns the full step increment (what dt*F
/// would be over one step starting at t) and the steppers apply it without
/// multiplying by dt again. In derivative mode, eval returns F itself and the
/// steppers scale it by dt exactly once, through step_increment below.
struct FluxField {
  std::function<Matrix(const Matrix& z, double t)> eval;
  bool increment_mode = false;

  Matrix step_increment(const Matrix& z, double t, double dt) const {
    return increment_mode ? eval(z, t) : Matrix(dt * eval(z, t));
  }
};

/// Closed-form reference t -> A(t).
using ExactSolution = std::function<Matrix(double t)>;

}  // namespace lowrank
