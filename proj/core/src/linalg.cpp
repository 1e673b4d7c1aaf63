#include "lowrank/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "lowrank/errors.hpp"
#include "lowrank/rng.hpp"

namespace lowrank {

namespace {

void require_finite(const Matrix& a, const char* who) {
  if (!a.allFinite())
    throw NonFiniteError(std::string(who) + ": non-finite entry in input");
}

}  // namespace

QrPair qr_thin(const Matrix& a) {
  const Index n = a.rows();
  const Index r = a.cols();
  if (r < 1 || n < r)
    throw DimensionError("qr_thin: need rows >= cols >= 1, got " +
                         std::to_string(n) + "x" + std::to_string(r));
  require_finite(a, "qr_thin");

  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  Matrix rf = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();

  // Fix the sign convention: nonnegative diagonal of R, zero entries kept.
  for (Index k = 0; k < r; ++k) {
    if (rf(k, k) < 0.0) {
      rf.row(k) = -rf.row(k);
      q.col(k) = -q.col(k);
    }
  }
  return {std::move(q), std::move(rf)};
}

Matrix pinv(const Matrix& a) {
  if (a.size() == 0) throw DimensionError("pinv: empty matrix");
  require_finite(a, "pinv");

  const Matrix normal = a.transpose() * a;
  Eigen::LDLT<Matrix> ldlt(normal);
  const Vector d = ldlt.vectorD().cwiseAbs();
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  if (ldlt.info() != Eigen::Success || !(dmax > 0.0) || dmin < 1e-14 * dmax)
    throw SingularMatrixError("pinv: a^T a numerically singular");
  return ldlt.solve(a.transpose());
}

ProjectorPair projectors(const Matrix& u) {
  const Index n = u.rows();
  const Index r = u.cols();
  if (r < 1 || n < r)
    throw DimensionError("projectors: need rows >= cols >= 1");
  require_finite(u, "projectors");

  const double dev = (u.transpose() * u - Matrix::Identity(r, r)).norm();
  if (dev > 1e-8)
    throw OrthonormalityError(
        "projectors: columns not orthonormal, |u^T u - I|_F = " +
        std::to_string(dev));

  Matrix p = u * u.transpose();
  Matrix p_perp = Matrix::Identity(n, n) - p;
  return {std::move(p), std::move(p_perp)};
}

Matrix orthonormal_complement(const Matrix& u) {
  const Index n = u.rows();
  const Index r = u.cols();
  if (n <= r)
    throw DimensionError("orthonormal_complement: no complement for " +
                         std::to_string(n) + "x" + std::to_string(r));
  require_finite(u, "orthonormal_complement");

  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q_full = qr.householderQ() * Matrix::Identity(n, n);
  return q_full.rightCols(n - r);
}

LowRankState truncated_svd(const Matrix& a, Index r) {
  if (r < 1 || r > std::min(a.rows(), a.cols()))
    throw DimensionError("truncated_svd: rank " + std::to_string(r) +
                         " out of range for " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()));
  require_finite(a, "truncated_svd");

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LowRankState z;
  z.u = svd.matrixU().leftCols(r);
  z.g = Matrix(svd.singularValues().head(r).asDiagonal());
  z.v = svd.matrixV().leftCols(r);
  return z;
}

Matrix matrix_exp(const Matrix& a) {
  if (a.rows() != a.cols())
    throw DimensionError("matrix_exp: square input required");
  require_finite(a, "matrix_exp");
  const Index n = a.rows();
  if (n == 0) return a;

  // Degree-13 Pade numerator/denominator coefficients.
  static constexpr double b[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  static constexpr double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  Matrix as = a;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    as /= std::ldexp(1.0, squarings);
  }

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                         b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                   b[4] * a4 + b[2] * a2 + b[0] * ident;

  Matrix r = Eigen::PartialPivLU<Matrix>(v - u).solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix random_skew_symmetric(Index n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_skew_symmetric: need n >= 1");
  const Matrix b = random_uniform_matrix(n, n, seed);
  return 0.5 * (b - b.transpose());
}

}  // namespace lowrank
