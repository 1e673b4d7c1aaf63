#pragma once

#include <cstdint>
#include <string>

#include "lowrank/flux.hpp"
#include "lowrank/state.hpp"

namespace lowrank {

/// A matrix ODE instance: flux, initial value, optional closed-form solution
/// and default time horizon. When `exact` is present it satisfies
/// exact(0) = x0.
struct ProblemSpec {
  Index n = 0;
  Index m = 0;
  FluxField flux;
  Matrix x0;
  ExactSolution exact;  // empty when no closed form is available
  double t_final = 1.0;
  std::string label;
};

/// Which flux the time-dependent matrix problem carries: the analytic
/// derivative dA/dt, or the per-step increment A(t+dt) - A(t) (which makes
/// both splitting integrators reproduce a rank-r solution exactly).
enum class FluxVariant { Derivative, Increment };

/// Time-dependent matrix family A(t) = exp(t)*exp(t W1) D exp(t W2) on [0,1],
/// with D diagonal, d_ii = 2^-i for i <= 10 and zero beyond, and W1, W2
/// random skew-symmetric generators drawn from seeds `seed` and `seed + 1`.
/// A(t) has rank 10 with singular values exp(t) 2^-i. The increment variant
/// needs the step size it will be used with.
ProblemSpec matrix_approx_problem(Index n, std::uint64_t seed,
                                  FluxVariant variant = FluxVariant::Derivative,
                                  double increment_dt = 0.0);

/// Centered finite-difference operators on the interior grid x_i = i*h,
/// i = 1..n, h = 1/(n+1), with homogeneous Dirichlet boundaries:
/// d_x = tridiag(1, -2, 1)/h^2 and c_x = tridiag(-1, 0, 1)/(2h).
struct FdOperators {
  Matrix d_x;
  Matrix c_x;
};

FdOperators build_fd_operators(Index n);

enum class BurgersMode { Single, Multi };

/// Parameter-dependent viscous Burgers problem, semi-discretized in space.
/// The state X(t) is n x m with rows indexing the n interior grid nodes and
/// columns indexing m parameter instances; the flux is
///   F(X, t) = d_x X M_xi + advection_sign * X .* (c_x X) + S(t),
/// with M_xi = diag(viscosities), .* the entrywise product and S(t) the
/// sampled source term. advection_sign = -1 matches the PDE
/// u_t = mu u_xx - u u_x + f; +1 reproduces the flipped-advection variant.
struct BurgersConfig {
  Index n = 100;
  Index m = 60;
  BurgersMode mode = BurgersMode::Single;
  std::uint64_t seed = 0;
  double t_final = 1.0;
  double advection_sign = -1.0;
};

/// Parameter box: xi1 (viscosity) in [0.01, 0.06]; in single mode xi2 = 4 and
/// xi3 = 0 are fixed and xi1 runs over a uniform grid including both
/// endpoints; in multi mode (xi1, xi2, xi3) is sampled i.i.d. uniformly from
/// [0.01, 0.06] x [2, 4] x [0.01, 0.1].
inline constexpr double kXi1Min = 0.01, kXi1Max = 0.06;
inline constexpr double kXi2Min = 2.0, kXi2Max = 4.0;
inline constexpr double kXi3Min = 0.01, kXi3Max = 0.1;
inline constexpr double kXi2Single = 4.0, kXi3Single = 0.0;

/// m x 3 table of parameter samples (xi1, xi2, xi3), deterministic per seed.
/// In multi mode each row consumes three SplitMix64 draws in (xi1, xi2, xi3)
/// order.
Matrix sample_parameters(Index m, BurgersMode mode, std::uint64_t seed);

ProblemSpec burgers_problem(const BurgersConfig& config);

}  // namespace lowrank
