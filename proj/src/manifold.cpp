#include "ggdr/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ggdr/error.hpp"

namespace ggdr {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

double orthonormality_error(const Matrix& m) {
  return (m.transpose() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

GrassmannPoint::GrassmannPoint(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.cols() < 1 || basis_.rows() < basis_.cols()) {
    throw Error(ErrorKind::InvalidShape,
                "Grassmann basis must be D x n with 1 <= n <= D, got " +
                    shape(basis_));
  }
  const double err = orthonormality_error(basis_);
  if (!(err <= kOrthonormalTol)) {
    throw Error(ErrorKind::NotOrthonormal,
                "basis^T basis deviates from I by " + std::to_string(err));
  }
}

GrassmannPoint GrassmannPoint::rotated(const Matrix& h) const {
  return GrassmannPoint(basis_ * h);
}

MappingMatrix::MappingMatrix(Matrix w, Eigen::Index order, MeasureKind kind)
    : w_(std::move(w)), order_(order), kind_(kind) {
  if (order_ < 1 || w_.cols() < order_ || w_.rows() < w_.cols()) {
    throw Error(ErrorKind::InvalidShape,
                "mapping must satisfy 1 <= n <= d <= D, got n=" +
                    std::to_string(order_) + " and W " + shape(w_));
  }
  const double err = orthonormality_error(w_);
  if (!(err <= kMappingOrthonormalTol)) {
    throw Error(ErrorKind::NotOrthonormal,
                "W^T W deviates from I by " + std::to_string(err));
  }
}

MappingMatrix MappingMatrix::truncated_identity(Eigen::Index ambient,
                                                Eigen::Index target,
                                                Eigen::Index order,
                                                MeasureKind kind) {
  if (target < 1 || target > ambient) {
    throw Error(ErrorKind::InvalidShape, "truncated identity needs 1 <= d <= D");
  }
  return MappingMatrix(Matrix::Identity(ambient, target), order, kind);
}

MappingMatrix MappingMatrix::with_basis(Matrix w) const {
  return MappingMatrix(std::move(w), order_, kind_);
}

TangentVector::TangentVector(Matrix h, const MappingMatrix& base)
    : h_(std::move(h)) {
  if (h_.rows() != base.ambient() || h_.cols() != base.target()) {
    throw Error(ErrorKind::DimensionMismatch,
                "tangent " + shape(h_) + " at mapping " + shape(base.w()));
  }
  const double err = (base.w().transpose() * h_).norm();
  if (!(err <= kTangentTol * std::max(1.0, h_.norm()))) {
    throw Error(ErrorKind::InvalidArgument,
                "vector is not horizontal: ||W^T H|| = " + std::to_string(err));
  }
}

TangentVector TangentVector::zero(const MappingMatrix& base) {
  return TangentVector(Matrix::Zero(base.ambient(), base.target()), base);
}

double inner(const TangentVector& a, const TangentVector& b) {
  return (a.h().array() * b.h().array()).sum();
}

QrFactors orthonormalize(const Matrix& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index k = m.cols();
  if (k < 1 || k > rows) {
    throw Error(ErrorKind::InvalidShape,
                "orthonormalize needs 1 <= k <= D, got " + shape(m));
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  QrFactors out;
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  out.q = qr.householderQ() * Matrix::Identity(rows, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (out.r(j, j) < 0.0) {
      out.r.row(j) *= -1.0;
      out.q.col(j) *= -1.0;
    }
  }
  // R shares the singular values of m.
  const Vector sv = Eigen::JacobiSVD<Matrix>(out.r).singularValues();
  const double largest = sv(0);
  const double smallest = sv(k - 1);
  if (!(largest > 0.0) || !(smallest > kRankTol * largest)) {
    throw Error(ErrorKind::RankDeficient,
                "matrix " + shape(m) + " is not of full column rank (sigma_min=" +
                    std::to_string(smallest) +
                    ", sigma_max=" + std::to_string(largest) + ")");
  }
  return out;
}

PrincipalAngles principal_angles(const GrassmannPoint& x1,
                                 const GrassmannPoint& x2,
                                 NumericalHealth* health) {
  if (x1.ambient() != x2.ambient() || x1.order() != x2.order()) {
    throw Error(ErrorKind::DimensionMismatch,
                "principal angles between " + shape(x1.basis()) + " and " +
                    shape(x2.basis()));
  }
  const Matrix a = x1.basis().transpose() * x2.basis();
  const Vector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
  PrincipalAngles out;
  out.angles.resize(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (health && sv(i) > 1.0 + 1e-8) ++health->clamped_singular_values;
    out.angles(i) = std::acos(std::clamp(sv(i), 0.0, 1.0));
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

double geodesic_distance(const GrassmannPoint& x1, const GrassmannPoint& x2) {
  return principal_angles(x1, x2).angles.norm();
}

Geodesic::Geodesic(const MappingMatrix& start, const TangentVector& direction)
    : start_(start) {
  if (direction.h().rows() != start.ambient() ||
      direction.h().cols() != start.target()) {
    throw Error(ErrorKind::DimensionMismatch, "geodesic direction shape");
  }
  Eigen::JacobiSVD<Matrix> svd(direction.h(),
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  u_ = svd.matrixU();
  s_ = svd.singularValues();
  vt_ = svd.matrixV().transpose();
  wv_ = start.w() * svd.matrixV();
}

Matrix Geodesic::raw_point(double t) const {
  const Vector c = (s_ * t).array().cos();
  const Vector s = (s_ * t).array().sin();
  return (wv_ * c.asDiagonal() + u_ * s.asDiagonal()) * vt_;
}

MappingMatrix Geodesic::point(double t) const {
  return start_.with_basis(orthonormalize(raw_point(t)).q);
}

TangentVector Geodesic::transport(const TangentVector& z, double t) const {
  const Vector c = (s_ * t).array().cos();
  const Vector s = (s_ * t).array().sin();
  const Matrix utz = u_.transpose() * z.h();
  Matrix moved = (u_ * c.asDiagonal() - wv_ * s.asDiagonal()) * utz +
                 (z.h() - u_ * utz);
  const MappingMatrix end = point(t);
  // Strip the O(eps) vertical component left by re-orthonormalization.
  moved -= end.w() * (end.w().transpose() * moved);
  return TangentVector(std::move(moved), end);
}

MappingMatrix geodesic_step(const MappingMatrix& w, const TangentVector& h,
                            double t) {
  return Geodesic(w, h).point(t);
}

TangentVector parallel_transport(const TangentVector& hmove,
                                 const MappingMatrix& w0,
                                 const TangentVector& hdir, double t) {
  if (hmove.h().rows() != w0.ambient() || hmove.h().cols() != w0.target()) {
    throw Error(ErrorKind::DimensionMismatch, "transported vector shape");
  }
  return Geodesic(w0, hdir).transport(hmove, t);
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

GrassmannPoint random_point(Eigen::Index ambient, Eigen::Index order,
                            std::uint64_t seed) {
  if (order < 1 || order >= ambient) {
    throw Error(ErrorKind::InvalidShape,
                "random_point needs 1 <= n < D, got D=" +
                    std::to_string(ambient) + " n=" + std::to_string(order));
  }
  std::mt19937_64 rng(seed);
  return GrassmannPoint(orthonormalize(gaussian_matrix(ambient, order, rng)).q);
}

Matrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  return orthonormalize(gaussian_matrix(n, n, rng)).q;
}

}  // namespace ggdr
