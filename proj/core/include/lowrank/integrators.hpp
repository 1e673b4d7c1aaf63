#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lowrank/flux.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/state.hpp"

namespace lowrank {

enum class Method { Ksl, Chart, Euler };

Method parse_method(const std::string& name);
std::string method_name(Method method);

struct IntegratorConfig {
  Method method = Method::Ksl;
  Index rank = 1;          // ignored by Euler
  double dt = 0.0;
  double t_final = 0.0;
  Index store_stride = 1;  // record every stride-th step; 0 and K always kept
};

/// Time series of an integration run. All vectors share the same length:
/// one entry per stored instant. Low-rank methods fill `states` and the
/// sigma diagnostics (extreme singular values of the core G); Euler fills
/// `dense_states`. `errors` holds Frobenius errors against a reference at
/// stored instants when one was supplied (NaN where the reference grid has
/// no coincident instant).
struct TrajectoryRecord {
  Method method = Method::Euler;
  Index rank = 0;
  double dt = 0.0;
  double t_final = 0.0;

  std::vector<double> times;
  std::vector<Index> step_indices;
  std::vector<LowRankState> states;
  std::vector<Matrix> dense_states;
  std::vector<double> errors;
  std::vector<double> sigma_min_g;
  std::vector<double> sigma_max_g;

  Index stored() const { return static_cast<Index>(times.size()); }
  bool is_dense() const { return method == Method::Euler; }
  Matrix state_dense(Index i) const {
    return is_dense() ? dense_states.at(i) : states.at(i).dense();
  }
};

/// Best rank-r approximation of the initial value. A zero matrix gets the
/// documented convention: U and V are the leading r canonical coordinates
/// and G = 0.
LowRankState initial_state(const Matrix& a0, Index r);

/// Intermediate quantities of one splitting step, for diagnostics and
/// invariant tests.
struct KslStepTrace {
  Matrix k1, u1, g_hat, g_tilde, l1, v1, g1;
};

struct ChartStepTrace {
  Matrix h_hat, k1, u1, h_tilde, l1, v1, h1;
};

/// One step of the symmetric projector-splitting scheme: update K = UG
/// forward, G backward, L = VG^T forward, re-orthonormalizing with thin QR.
/// Never inverts G, so a singular core (over-approximation) is fine.
LowRankState ksl_step(const LowRankState& z, const FluxField& flux, double t,
                      double dt, KslStepTrace* trace = nullptr);

/// One step of the chart-based splitting scheme: update the core H forward,
/// then the column space, then the row space. The complement factors are
/// never materialized; their action is applied through I - U U^T and
/// I - V V^T. Never inverts G/H.
LowRankState chart_step(const LowRankState& z, const FluxField& flux, double t,
                        double dt, ChartStepTrace* trace = nullptr);

/// Explicit Euler step x + dt * F(x, t) (or x + increment in increment mode).
Matrix euler_step(const Matrix& x, const FluxField& flux, double t, double dt);

/// Number of uniform steps covering [0, t_final]; throws ConfigError unless
/// t_final/dt is an integer to relative 1e-9.
Index step_count(double t_final, double dt);

/// Integrates the problem from t = 0 to config.t_final with the chosen
/// method, recording states, step indices and core-singular-value
/// diagnostics every store_stride steps (plus step 0 and the final step).
/// Throws NonFiniteError (carrying the step index) as soon as any state
/// entry becomes NaN or Inf.
TrajectoryRecord integrate(const ProblemSpec& problem,
                           const IntegratorConfig& config);

/// Same, also filling `errors` with ||reference(t_k) - Z_k||_F at stored
/// instants.
TrajectoryRecord integrate(const ProblemSpec& problem,
                           const IntegratorConfig& config,
                           const ExactSolution& reference);

/// Same, comparing against another trajectory at coincident stored instants
/// (|t - t_ref| <= 1e-9); instants without a counterpart get NaN.
TrajectoryRecord integrate(const ProblemSpec& problem,
                           const IntegratorConfig& config,
                           const TrajectoryRecord& reference);

}  // namespace lowrank
