#include "lowrank/manifold.hpp"

#include <string>

#include <Eigen/Dense>

#include "lowrank/errors.hpp"
#include "lowrank/linalg.hpp"

namespace lowrank {

namespace {

void check_shape(bool ok, const char* msg) {
  if (!ok) throw DimensionError(msg);
}

// Explicit inverse from an SVD whose smallest singular value was already
// checked against zero.
Matrix inverse_from_svd(const Eigen::JacobiSVD<Matrix>& svd) {
  return svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
         svd.matrixU().transpose();
}

// Inverse of the core G, guarded at relative 1e-14; shared by the two
// operations whose contracts require an invertible core.
Matrix core_inverse(const Matrix& g, const char* who) {
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (!(smax > 0.0) || s(s.size() - 1) < 1e-14 * smax)
    throw SingularMatrixError(std::string(who) + ": core G numerically singular");
  return inverse_from_svd(svd);
}

}  // namespace

ChartBase make_chart_base(const LowRankState& state) {
  ChartBase base;
  base.state = state;
  base.u_perp = orthonormal_complement(state.u);
  base.v_perp = orthonormal_complement(state.v);
  return base;
}

Matrix chart_inverse(const ChartBase& base, const ChartCoordinates& coords) {
  const LowRankState& z = base.state;
  const Index r = z.rank();
  check_shape(coords.x.rows() == base.u_perp.cols() && coords.x.cols() == r,
              "chart_inverse: X has wrong shape");
  check_shape(coords.y.rows() == base.v_perp.cols() && coords.y.cols() == r,
              "chart_inverse: Y has wrong shape");
  check_shape(coords.h.rows() == r && coords.h.cols() == r,
              "chart_inverse: H has wrong shape");

  const Matrix left = z.u + base.u_perp * coords.x;
  const Matrix right = z.v + base.v_perp * coords.y;
  return left * coords.h * right.transpose();
}

ChartCoordinates chart_forward(const ChartBase& base, const Matrix& w) {
  const LowRankState& z = base.state;
  check_shape(w.rows() == z.rows() && w.cols() == z.cols(),
              "chart_forward: w has wrong shape");

  const Matrix u_pinv = pinv(z.u);            // r x n
  const Matrix v_pinv = pinv(z.v);            // r x m
  const Matrix up_pinv = pinv(base.u_perp);   // (n-r) x n
  const Matrix vp_pinv = pinv(base.v_perp);   // (m-r) x m

  ChartCoordinates coords;
  coords.h = u_pinv * w * v_pinv.transpose();

  Eigen::JacobiSVD<Matrix> svd(coords.h,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  // Membership test: H must be invertible. The relative check catches
  // ill-conditioned cores; the absolute one catches H that is pure roundoff
  // (w carried entirely by the complements).
  if (!(smax > 1e-14 * w.norm()) || s(s.size() - 1) < 1e-12 * smax)
    throw NotInNeighborhoodError(
        "chart_forward: H = U+ w (V+)^T is numerically singular");

  coords.x = up_pinv * w * v_pinv.transpose() * inverse_from_svd(svd);
  const Matrix ht = v_pinv * w.transpose() * u_pinv.transpose();
  coords.y = vp_pinv * w.transpose() * u_pinv.transpose() *
             Eigen::PartialPivLU<Matrix>(ht).inverse();
  return coords;
}

Matrix tangent_map(const ChartBase& base, const TangentTriple& t) {
  const LowRankState& z = base.state;
  const Index r = z.rank();
  check_shape(t.dx.rows() == base.u_perp.cols() && t.dx.cols() == r,
              "tangent_map: dX has wrong shape");
  check_shape(t.dy.rows() == base.v_perp.cols() && t.dy.cols() == r,
              "tangent_map: dY has wrong shape");
  check_shape(t.dh.rows() == r && t.dh.cols() == r,
              "tangent_map: dH has wrong shape");

  return base.u_perp * t.dx * z.g * z.v.transpose() +
         z.u * z.g * (base.v_perp * t.dy).transpose() +
         z.u * t.dh * z.v.transpose();
}

TangentTriple tangent_map_inverse(const ChartBase& base, const Matrix& dw) {
  const LowRankState& z = base.state;
  check_shape(dw.rows() == z.rows() && dw.cols() == z.cols(),
              "tangent_map_inverse: dw has wrong shape");

  const Matrix ginv = core_inverse(z.g, "tangent_map_inverse");
  const Matrix u_pinv = pinv(z.u);
  const Matrix v_pinv = pinv(z.v);
  const Matrix up_pinv = pinv(base.u_perp);
  const Matrix vp_pinv = pinv(base.v_perp);

  TangentTriple t;
  t.dx = up_pinv * dw * v_pinv.transpose() * ginv;
  t.dy = vp_pinv * dw.transpose() * u_pinv.transpose() * ginv.transpose();
  t.dh = u_pinv * dw * v_pinv.transpose();
  return t;
}

Matrix tangent_project(const LowRankState& state, const Matrix& a) {
  check_shape(a.rows() == state.rows() && a.cols() == state.cols(),
              "tangent_project: a has wrong shape");

  // P_U_perp a P_V + P_U a P_V_perp + P_U a P_V = a P_V + P_U a - P_U a P_V,
  // assembled from factored products to avoid the n x n projectors.
  const Matrix av = a * state.v;                      // n x r
  const Matrix ua = state.u.transpose() * a;          // r x m
  const Matrix uav = state.u.transpose() * av;        // r x r
  return av * state.v.transpose() + state.u * ua -
         state.u * uav * state.v.transpose();
}

Matrix split_project(const LowRankState& state, const Matrix& a, SplitOp which) {
  check_shape(a.rows() == state.rows() && a.cols() == state.cols(),
              "split_project: a has wrong shape");
  const Matrix& u = state.u;
  const Matrix& v = state.v;

  switch (which) {
    case SplitOp::Q1:
      return (a * v) * v.transpose();
    case SplitOp::Q2:
    case SplitOp::P1:
      return u * (u.transpose() * a * v) * v.transpose();
    case SplitOp::Q3:
      return u * (u.transpose() * a);
    case SplitOp::P2: {
      const Matrix av = a * v;
      return (av - u * (u.transpose() * av)) * v.transpose();
    }
    case SplitOp::P3: {
      const Matrix ua = u.transpose() * a;
      return u * (ua - (ua * v) * v.transpose());
    }
  }
  throw ConfigError("split_project: unknown operator");
}

GaugeTriple gauge_triple(const LowRankState& state, const Matrix& dz) {
  check_shape(dz.rows() == state.rows() && dz.cols() == state.cols(),
              "gauge_triple: dz has wrong shape");

  const Matrix ginv = core_inverse(state.g, "gauge_triple");
  const Matrix& u = state.u;
  const Matrix& v = state.v;

  GaugeTriple out;
  const Matrix dzv = dz * v;
  out.du = (dzv - u * (u.transpose() * dzv)) * ginv;
  const Matrix dztu = dz.transpose() * u;
  out.dv = (dztu - v * (v.transpose() * dztu)) * ginv.transpose();
  out.dg = u.transpose() * dz * v;
  return out;
}

}  // namespace lowrank
