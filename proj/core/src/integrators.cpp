#include "lowrank/integrators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "lowrank/errors.hpp"
#include "lowrank/linalg.hpp"

namespace lowrank {

Method parse_method(const std::string& name) {
  if (name == "ksl") return Method::Ksl;
  if (name == "chart") return Method::Chart;
  if (name == "euler") return Method::Euler;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method method) {
  switch (method) {
    case Method::Ksl: return "ksl";
    case Method::Chart: return "chart";
    case Method::Euler: return "euler";
  }
  return "?";
}

LowRankState initial_state(const Matrix& a0, Index r) {
  if (r < 1 || r > std::min(a0.rows(), a0.cols()))
    throw DimensionError("initial_state: rank out of range");
  if (a0.isZero(0.0)) {
    LowRankState z;
    z.u = Matrix::Identity(a0.rows(), r);
    z.g = Matrix::Zero(r, r);
    z.v = Matrix::Identity(a0.cols(), r);
    return z;
  }
  return truncated_svd(a0, r);
}

LowRankState ksl_step(const LowRankState& z, const FluxField& flux, double t,
                      double dt, KslStepTrace* trace) {
  const Matrix& u0 = z.u;
  const Matrix& g0 = z.g;
  const Matrix& v0 = z.v;

  // K sub-step: K_1 = U_0 G_0 + dt F(Z_0) V_0, thin QR -> (U_1, G_hat).
  const Matrix inc0 = flux.step_increment(z.dense(), t, dt);
  const Matrix k1 = u0 * g0 + inc0 * v0;
  QrPair qk = qr_thin(k1);
  const Matrix& u1 = qk.q;
  const Matrix& g_hat = qk.r_factor;

  // S sub-step, backward: G_tilde = G_hat - dt U_1^T F(U_1 G_hat V_0^T) V_0.
  const Matrix inc1 =
      flux.step_increment(u1 * g_hat * v0.transpose(), t, dt);
  const Matrix g_tilde = g_hat - u1.transpose() * inc1 * v0;

  // L sub-step: L_1 = V_0 G_tilde^T + dt F(U_1 G_tilde V_0^T)^T U_1,
  // thin QR -> (V_1, G_1^T).
  const Matrix inc2 =
      flux.step_increment(u1 * g_tilde * v0.transpose(), t, dt);
  const Matrix l1 = v0 * g_tilde.transpose() + inc2.transpose() * u1;
  QrPair ql = qr_thin(l1);

  LowRankState out{u1, ql.r_factor.transpose(), ql.q};
  if (trace)
    *trace = {k1, u1, g_hat, g_tilde, l1, out.v, out.g};
  return out;
}

LowRankState chart_step(const LowRankState& z, const FluxField& flux, double t,
                        double dt, ChartStepTrace* trace) {
  const Matrix& u0 = z.u;
  const Matrix& h0 = z.g;
  const Matrix& v0 = z.v;

  // Core sub-step, forward: H_hat = H_0 + dt U_0^T F(U_0 H_0 V_0^T) V_0.
  const Matrix inc0 = flux.step_increment(z.dense(), t, dt);
  const Matrix h_hat = h0 + u0.transpose() * inc0 * v0;

  // Column sub-step. The complement factor is not materialized:
  // U_0_perp (X H)_1 = (I - U_0 U_0^T) dt F(U_0 H_hat V_0^T) V_0.
  const Matrix inc1v =
      flux.step_increment(u0 * h_hat * v0.transpose(), t, dt) * v0;
  const Matrix k1 = u0 * h_hat + (inc1v - u0 * (u0.transpose() * inc1v));
  QrPair qk = qr_thin(k1);
  const Matrix& u1 = qk.q;
  const Matrix& h_tilde = qk.r_factor;

  // Row sub-step: V_0_perp (Y H^T)_1 = (I - V_0 V_0^T) dt F(...)^T U_1.
  const Matrix inc2u =
      flux.step_increment(u1 * h_tilde * v0.transpose(), t, dt).transpose() *
      u1;
  const Matrix l1 =
      v0 * h_tilde.transpose() + (inc2u - v0 * (v0.transpose() * inc2u));
  QrPair ql = qr_thin(l1);

  LowRankState out{u1, ql.r_factor.transpose(), ql.q};
  if (trace)
    *trace = {h_hat, k1, u1, h_tilde, l1, out.v, out.g};
  return out;
}

Matrix euler_step(const Matrix& x, const FluxField& flux, double t, double dt) {
  return x + flux.step_increment(x, t, dt);
}

Index step_count(double t_final, double dt) {
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw ConfigError("step_count: need dt > 0 and t_final > 0");
  const double k_real = t_final / dt;
  const auto k = static_cast<Index>(std::llround(k_real));
  if (k < 1 || std::abs(static_cast<double>(k) * dt - t_final) >
                   1e-9 * t_final)
    throw ConfigError("step_count: t_final/dt = " + std::to_string(k_real) +
                      " is not an integer step count");
  return k;
}

namespace {

void record_low_rank(TrajectoryRecord& rec, Index k, double tk,
                     const LowRankState& z) {
  rec.times.push_back(tk);
  rec.step_indices.push_back(k);
  rec.states.push_back(z);
  Eigen::JacobiSVD<Matrix> svd(z.g);
  const Vector& s = svd.singularValues();
  rec.sigma_min_g.push_back(s.size() > 0 ? s(s.size() - 1) : 0.0);
  rec.sigma_max_g.push_back(s.size() > 0 ? s(0) : 0.0);
}

void record_dense(TrajectoryRecord& rec, Index k, double tk, const Matrix& x) {
  rec.times.push_back(tk);
  rec.step_indices.push_back(k);
  rec.dense_states.push_back(x);
  rec.sigma_min_g.push_back(std::numeric_limits<double>::quiet_NaN());
  rec.sigma_max_g.push_back(std::numeric_limits<double>::quiet_NaN());
}

bool state_finite(const LowRankState& z) {
  return z.u.allFinite() && z.g.allFinite() && z.v.allFinite();
}

void fill_errors_vs_exact(TrajectoryRecord& rec, const ExactSolution& exact) {
  rec.errors.resize(rec.times.size());
  for (Index i = 0; i < rec.stored(); ++i)
    rec.errors[i] = (exact(rec.times[i]) - rec.state_dense(i)).norm();
}

void fill_errors_vs_trajectory(TrajectoryRecord& rec,
                               const TrajectoryRecord& ref) {
  rec.errors.assign(rec.times.size(),
                    std::numeric_limits<double>::quiet_NaN());
  // Both time grids are increasing; one sweep matches coincident instants.
  Index j = 0;
  for (Index i = 0; i < rec.stored(); ++i) {
    while (j < ref.stored() && ref.times[j] < rec.times[i] - 1e-9) ++j;
    if (j < ref.stored() && std::abs(ref.times[j] - rec.times[i]) <= 1e-9)
      rec.errors[i] = (ref.state_dense(j) - rec.state_dense(i)).norm();
  }
}

TrajectoryRecord integrate_impl(const ProblemSpec& problem,
                                const IntegratorConfig& config) {
  if (problem.x0.rows() != problem.n || problem.x0.cols() != problem.m)
    throw ConfigError("integrate: x0 does not match the problem dimensions");
  const Index k_total = step_count(config.t_final, config.dt);
  const Index stride = config.store_stride > 0 ? config.store_stride : 1;
  const double dt = config.dt;

  TrajectoryRecord rec;
  rec.method = config.method;
  rec.rank = config.method == Method::Euler ? 0 : config.rank;
  rec.dt = dt;
  rec.t_final = config.t_final;

  if (config.method == Method::Euler) {
    Matrix x = problem.x0;
    if (!x.allFinite()) throw NonFiniteError("integrate: non-finite x0", 0);
    record_dense(rec, 0, 0.0, x);
    for (Index k = 1; k <= k_total; ++k) {
      x = euler_step(x, problem.flux, static_cast<double>(k - 1) * dt, dt);
      if (!x.allFinite())
        throw NonFiniteError(
            "integrate: non-finite state at step " + std::to_string(k), k);
      if (k % stride == 0 || k == k_total)
        record_dense(rec, k, static_cast<double>(k) * dt, x);
    }
    return rec;
  }

  if (config.rank < 1 ||
      config.rank > std::min(problem.n, problem.m))
    throw ConfigError("integrate: rank out of range for the problem");

  LowRankState z = initial_state(problem.x0, config.rank);
  record_low_rank(rec, 0, 0.0, z);
  for (Index k = 1; k <= k_total; ++k) {
    const double tk = static_cast<double>(k - 1) * dt;
    z = config.method == Method::Ksl ? ksl_step(z, problem.flux, tk, dt)
                                     : chart_step(z, problem.flux, tk, dt);
    if (!state_finite(z))
      throw NonFiniteError(
          "integrate: non-finite state at step " + std::to_string(k), k);
    if (k % stride == 0 || k == k_total)
      record_low_rank(rec, k, static_cast<double>(k) * dt, z);
  }
  return rec;
}

}  // namespace

TrajectoryRecord integrate(const ProblemSpec& problem,
                           const IntegratorConfig& config) {
  return integrate_impl(problem, config);
}

TrajectoryRecord integrate(const ProblemSpec& problem,
                           const IntegratorConfig& config,
                           const ExactSolution& reference) {
  TrajectoryRecord rec = integrate_impl(problem, config);
  if (reference) fill_errors_vs_exact(rec, reference);
  return rec;
}

TrajectoryRecord integrate(const ProblemSpec& problem,
                           const IntegratorConfig& config,
                           const TrajectoryRecord& reference) {
  TrajectoryRecord rec = integrate_impl(problem, config);
  fill_errors_vs_trajectory(rec, reference);
  return rec;
}

}  // namespace lowrank
