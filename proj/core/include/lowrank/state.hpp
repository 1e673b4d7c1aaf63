#pragma once

#include <Eigen/Core>

namespace lowrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Factored rank-r point Z = U G V^T with U (n x r) and V (m x r) holding
/// orthonormal columns. G is an arbitrary r x r core: it may be singular
/// (over-approximation is a supported regime) and no operation in this
/// library inverts it unless its contract says so explicitly.
struct LowRankState {
  Matrix u;
  Matrix g;
  Matrix v;

  Index rows() const { return u.rows(); }
  Index cols() const { return v.rows(); }
  Index rank() const { return g.rows(); }

  /// Dense reconstruction U G V^T.
  Matrix dense() const { return u * g * v.transpose(); }
};

}  // namespace lowrank
