#include "lowrank/problems.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/linalg.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

namespace {

// One-entry memo for z-independent fluxes: the splitting substeps all
// evaluate at the same instant, so caching the last value avoids recomputing
// the matrix exponentials three times per step. Guarded for concurrent use;
// the wrapped eval stays a pure function of t.
class TimeMemo {
 public:
  Matrix eval(double t, const std::function<Matrix(double)>& compute) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!valid_ || t != t_) {
      value_ = compute(t);
      t_ = t;
      valid_ = true;
    }
    return value_;
  }

 private:
  std::mutex mutex_;
  bool valid_ = false;
  double t_ = 0.0;
  Matrix value_;
};

}  // namespace

ProblemSpec matrix_approx_problem(Index n, std::uint64_t seed,
                                  FluxVariant variant, double increment_dt) {
  if (n < 10)
    throw DimensionError("matrix_approx_problem: need n >= 10, got " +
                         std::to_string(n));

  // Generator scale: keeps ||W|| small enough that the first-order-in-dt
  // error does not swamp the rank-truncation floor at the step sizes this
  // family is run with.
  constexpr double kGeneratorScale = 0.15;
  const Matrix w1 = kGeneratorScale * random_skew_symmetric(n, seed);
  const Matrix w2 = kGeneratorScale * random_skew_symmetric(n, seed + 1);
  Vector d = Vector::Zero(n);
  for (Index i = 0; i < 10; ++i) d(i) = std::pow(2.0, -static_cast<double>(i + 1));

  ExactSolution exact = [w1, w2, d](double t) -> Matrix {
    return std::exp(t) * (matrix_exp(t * w1) * d.asDiagonal() * matrix_exp(t * w2));
  };

  ProblemSpec p;
  p.n = n;
  p.m = n;
  p.x0 = Matrix(d.asDiagonal());  // = exact(0)
  p.exact = exact;
  p.t_final = 1.0;

  auto memo = std::make_shared<TimeMemo>();
  switch (variant) {
    case FluxVariant::Derivative:
      // dA/dt = W1 A + A + A W2 (the exp(t) factor contributes the middle term).
      p.flux.eval = [w1, w2, exact, memo](const Matrix&, double t) -> Matrix {
        return memo->eval(t, [&](double s) -> Matrix {
          const Matrix at = exact(s);
          return w1 * at + at + at * w2;
        });
      };
      p.flux.increment_mode = false;
      p.label = "matrix-approx/derivative";
      break;
    case FluxVariant::Increment:
      if (!(increment_dt > 0.0))
        throw ConfigError("matrix_approx_problem: increment flux needs dt > 0");
      p.flux.eval = [exact, increment_dt, memo](const Matrix&, double t) -> Matrix {
        return memo->eval(t, [&](double s) -> Matrix {
          return exact(s + increment_dt) - exact(s);
        });
      };
      p.flux.increment_mode = true;
      p.label = "matrix-approx/increment";
      break;
  }
  return p;
}

FdOperators build_fd_operators(Index n) {
  if (n < 3) throw DimensionError("build_fd_operators: need n >= 3");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double w2 = 1.0 / (h * h);
  const double w1 = 1.0 / (2.0 * h);

  FdOperators ops{Matrix::Zero(n, n), Matrix::Zero(n, n)};
  for (Index i = 0; i < n; ++i) {
    ops.d_x(i, i) = -2.0 * w2;
    if (i > 0) {
      ops.d_x(i, i - 1) = w2;
      ops.c_x(i, i - 1) = -w1;
    }
    if (i < n - 1) {
      ops.d_x(i, i + 1) = w2;
      ops.c_x(i, i + 1) = w1;
    }
  }
  return ops;
}

Matrix sample_parameters(Index m, BurgersMode mode, std::uint64_t seed) {
  if (m < 1) throw DimensionError("sample_parameters: need m >= 1");
  Matrix table(m, 3);
  if (mode == BurgersMode::Single) {
    for (Index j = 0; j < m; ++j) {
      const double s =
          m > 1 ? static_cast<double>(j) / static_cast<double>(m - 1) : 0.0;
      table(j, 0) = kXi1Min + s * (kXi1Max - kXi1Min);
      table(j, 1) = kXi2Single;
      table(j, 2) = kXi3Single;
    }
  } else {
    SplitMix64 rng(seed);
    for (Index j = 0; j < m; ++j) {
      table(j, 0) = rng.uniform(kXi1Min, kXi1Max);
      table(j, 1) = rng.uniform(kXi2Min, kXi2Max);
      table(j, 2) = rng.uniform(kXi3Min, kXi3Max);
    }
  }
  return table;
}

namespace {

// (z_{i-1} - 2 z_i + z_{i+1}) * w, zero Dirichlet halo: the banded action of
// the dense d_x operator.
Matrix apply_laplacian(const Matrix& z, double w) {
  const Index n = z.rows();
  Matrix out = -2.0 * z;
  out.topRows(n - 1) += z.bottomRows(n - 1);
  out.bottomRows(n - 1) += z.topRows(n - 1);
  return w * out;
}

// (z_{i+1} - z_{i-1}) * w, the banded action of c_x.
Matrix apply_first_derivative(const Matrix& z, double w) {
  const Index n = z.rows();
  Matrix out = Matrix::Zero(n, z.cols());
  out.topRows(n - 1) = z.bottomRows(n - 1);
  out.bottomRows(n - 1) -= z.topRows(n - 1);
  return w * out;
}

}  // namespace

ProblemSpec burgers_problem(const BurgersConfig& config) {
  const Index n = config.n;
  const Index m = config.m;
  if (n < 3) throw DimensionError("burgers_problem: need n >= 3");
  if (m < 1) throw DimensionError("burgers_problem: need m >= 1");

  const double h = 1.0 / static_cast<double>(n + 1);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = static_cast<double>(i + 1) * h;

  const Matrix params = sample_parameters(m, config.mode, config.seed);
  const Vector xi1 = params.col(0);
  const Vector xi2 = params.col(1);
  const Vector xi3 = params.col(2);

  // Source f(x, t; xi) = xi2 exp(-(x-0.2)^2/0.03^2) sin(xi2 pi t) 1_[0.1,0.3](x)
  // factors as bump(x) * s(t; xi)^T, a rank-one matrix per instant.
  Vector bump(n);
  for (Index i = 0; i < n; ++i) {
    const double xi = x(i);
    bump(i) = (xi >= 0.1 && xi <= 0.3)
                  ? std::exp(-std::pow((xi - 0.2) / 0.03, 2))
                  : 0.0;
  }

  const double inv_h2 = 1.0 / (h * h);
  const double inv_2h = 1.0 / (2.0 * h);
  const double adv = config.advection_sign;

  ProblemSpec p;
  p.n = n;
  p.m = m;
  p.t_final = config.t_final;
  p.label = config.mode == BurgersMode::Single ? "burgers-single" : "burgers-multi";

  p.flux.increment_mode = false;
  p.flux.eval = [n, m, xi1, xi2, bump, inv_h2, inv_2h, adv](
                    const Matrix& z, double t) -> Matrix {
    if (z.rows() != n || z.cols() != m)
      throw DimensionError("burgers flux: state has wrong shape");
    Matrix f = apply_laplacian(z, inv_h2) * xi1.asDiagonal();
    f += adv * z.cwiseProduct(apply_first_derivative(z, inv_2h));
    Vector s(m);
    for (Index j = 0; j < m; ++j)
      s(j) = xi2(j) * std::sin(xi2(j) * M_PI * t);
    f += bump * s.transpose();
    return f;
  };

  // Initial condition sampled from u0 on the interior grid.
  p.x0 = Matrix(n, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double xi = x(i);
      if (config.mode == BurgersMode::Single) {
        p.x0(i, j) = std::sin(xi * xi1(j)) *
                     std::exp(-100.0 * std::pow(xi - 10.0 * xi1(j), 2));
      } else {
        p.x0(i, j) =
            xi3(j) * std::exp(-100.0 * std::pow(xi - 10.0 * xi2(j), 2));
      }
    }
  }
  return p;
}

}  // namespace lowrank
