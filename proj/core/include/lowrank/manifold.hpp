#pragma once

#include "lowrank/state.hpp"

namespace lowrank {

/// A rank-r point together with explicit orthonormal complements of its
/// column and row spaces. Complements are materialized only here, for the
/// chart operations; the time steppers work with projectors instead.
struct ChartBase {
  LowRankState state;
  Matrix u_perp;  // n x (n-r), u_perp^T u = 0
  Matrix v_perp;  // m x (m-r), v_perp^T v = 0
};

/// Local coordinates (X, Y, H) of a matrix W = (U + U_perp X) H (V + V_perp Y)^T
/// in the neighborhood of the base point. Membership in the neighborhood
/// means H is invertible; that is checked by the chart map, not stored.
struct ChartCoordinates {
  Matrix x;  // (n-r) x r
  Matrix y;  // (m-r) x r
  Matrix h;  // r x r
};

/// Coordinates (dX, dY, dH) of a tangent vector at the base point.
struct TangentTriple {
  Matrix dx;  // (n-r) x r
  Matrix dy;  // (m-r) x r
  Matrix dh;  // r x r
};

/// Factor-derivative parametrization (dU, dG, dV) of a tangent vector,
/// unique under the gauge conditions u^T dU = 0 and v^T dV = 0.
struct GaugeTriple {
  Matrix du;  // n x r
  Matrix dg;  // r x r
  Matrix dv;  // m x r
};

/// Builds the chart base at `state`, computing both complements.
/// Requires n > r and m > r.
ChartBase make_chart_base(const LowRankState& state);

/// W = (U + U_perp X) H (V + V_perp Y)^T.
Matrix chart_inverse(const ChartBase& base, const ChartCoordinates& coords);

/// Local coordinates of w in the chart at the base point:
///   H = U+ w (V+)^T,
///   X = U_perp+ w (V+)^T H^{-1},
///   Y = V_perp+ w^T (U+)^T (V+ w^T (U+)^T)^{-1},
/// with + the Moore-Penrose pseudo-inverse, so the map is valid for
/// non-orthonormal factors as well. Throws NotInNeighborhoodError when H is
/// numerically singular (smallest singular value < 1e-12 times the largest).
ChartCoordinates chart_forward(const ChartBase& base, const Matrix& w);

/// U_perp dX G V^T + U G (V_perp dY)^T + U dH V^T.
Matrix tangent_map(const ChartBase& base, const TangentTriple& t);

/// Inverse of the tangent map, requiring an invertible core G:
///   dX = U_perp+ dw (V+)^T G^{-1},
///   dY = V_perp+ dw^T (U+)^T G^{-T},
///   dH = U+ dw (V+)^T.
/// Exact on tangent vectors; applied to a general matrix it composes the
/// inverse with an oblique restriction, the formula taken verbatim.
TangentTriple tangent_map_inverse(const ChartBase& base, const Matrix& dw);

/// Orthogonal projection of a onto the tangent space at the state:
/// P_U_perp a P_V + P_U a P_V_perp + P_U a P_V with P_U = U U^T, P_V = V V^T.
Matrix tangent_project(const LowRankState& state, const Matrix& a);

/// The six elementary projections entering the two splittings of the
/// tangent-space projector:
///   Q1 a = a P_V,        Q2 a = P_U a P_V,      Q3 a = P_U a,
///   P1 a = P_U a P_V,    P2 a = P_U_perp a P_V,  P3 a = P_U a P_V_perp.
/// Q1 - Q2 + Q3 and P1 + P2 + P3 both equal tangent_project; only the P
/// family is a direct-sum decomposition.
enum class SplitOp { Q1, Q2, Q3, P1, P2, P3 };

Matrix split_project(const LowRankState& state, const Matrix& a, SplitOp which);

/// Factor-derivative parametrization of a tangent vector dz:
///   dU = (I - U U^T) dz V G^{-1},
///   dV = (I - V V^T) dz^T U G^{-T},
///   dG = U^T dz V.
/// Requires an invertible G; the outputs satisfy the gauge conditions.
GaugeTriple gauge_triple(const LowRankState& state, const Matrix& dz);

}  // namespace lowrank
