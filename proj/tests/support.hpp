#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lowrank/linalg.hpp"
#include "lowrank/manifold.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/state.hpp"

namespace testing {

using lowrank::Index;
using lowrank::Matrix;

inline Matrix random_orthonormal(Index n, Index r, std::uint64_t seed) {
  return lowrank::qr_thin(lowrank::random_uniform_matrix(n, r, seed)).q;
}

/// Random core with sigma_min bounded away from zero (resampled until the
/// bound holds; deterministic given the seed).
inline Matrix random_core(Index r, std::uint64_t seed, double sigma_floor = 0.2) {
  lowrank::SplitMix64 rng(seed);
  for (;;) {
    Matrix g = lowrank::random_uniform_matrix(r, r, rng);
    Eigen::JacobiSVD<Matrix> svd(g);
    if (svd.singularValues()(r - 1) >= sigma_floor) return g;
  }
}

inline lowrank::LowRankState random_state(Index n, Index m, Index r,
                                          std::uint64_t seed,
                                          double sigma_floor = 0.2) {
  lowrank::LowRankState z;
  z.u = random_orthonormal(n, r, seed);
  z.v = random_orthonormal(m, r, seed + 1);
  z.g = random_core(r, seed + 2, sigma_floor);
  return z;
}

inline lowrank::ChartBase random_base(Index n, Index m, Index r,
                                      std::uint64_t seed,
                                      double sigma_floor = 0.2) {
  return lowrank::make_chart_base(random_state(n, m, r, seed, sigma_floor));
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  const double scale = want.norm();
  return scale > 0 ? (got - want).norm() / scale : (got - want).norm();
}

}  // namespace testing
