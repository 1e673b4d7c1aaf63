#pragma once

#include <cstdint>

#include "lowrank/state.hpp"

namespace lowrank {

/// Thin QR factorization a = q * r_factor with q (n x r) orthonormal and
/// r_factor (r x r) upper triangular with nonnegative diagonal. The sign of
/// each column of q is flipped to make the diagonal nonnegative, so the
/// factorization is deterministic. Rank-deficient input is accepted: zero
/// diagonal entries of r_factor are left in place and the factorization
/// still reconstructs the input.
struct QrPair {
  Matrix q;
  Matrix r_factor;
};

QrPair qr_thin(const Matrix& a);

/// Moore-Penrose pseudo-inverse (a^T a)^{-1} a^T of a full-column-rank
/// matrix, computed through a pivoted factorization of the r x r normal
/// matrix. Throws SingularMatrixError when a^T a is numerically singular
/// (smallest pivot below 1e-14 times the largest).
Matrix pinv(const Matrix& a);

/// Orthogonal projector p = u u^T onto range(u) and its complement
/// p_perp = I - p, for u with orthonormal columns.
struct ProjectorPair {
  Matrix p;
  Matrix p_perp;
};

ProjectorPair projectors(const Matrix& u);

/// n x (n-r) orthonormal basis of the orthogonal complement of range(u):
/// the trailing columns of the accumulated orthogonal factor of a full
/// Householder QR of u. Deterministic given u.
Matrix orthonormal_complement(const Matrix& u);

/// Best rank-r Frobenius approximation of a via a dense SVD. The core g is
/// diagonal with nonincreasing nonnegative entries; trailing zeros appear
/// when rank(a) < r.
LowRankState truncated_svd(const Matrix& a, Index r);

/// Matrix exponential by scaling and squaring with the degree-13 Pade
/// approximant.
Matrix matrix_exp(const Matrix& a);

/// W = (B - B^T)/2 where B has i.i.d. entries uniform in [-1, 1] drawn from
/// SplitMix64(seed) in row-major order. W^T = -W holds exactly and equal
/// seeds give bitwise-identical results.
Matrix random_skew_symmetric(Index n, std::uint64_t seed);

}  // namespace lowrank
