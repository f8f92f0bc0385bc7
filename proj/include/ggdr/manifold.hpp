#pragma once

#include <cstdint>
#include <random>

#include "ggdr/measure_kind.hpp"
#include "ggdr/types.hpp"

namespace ggdr {

inline constexpr double kOrthonormalTol = 1e-10;
inline constexpr double kMappingOrthonormalTol = 1e-8;
inline constexpr double kTangentTol = 1e-8;
inline constexpr double kRankTol = 1e-12;

/// ||M^T M - I||_F.
double orthonormality_error(const Matrix& m);

/// A point of G(n, D) held as a D x n column-orthonormal basis.
///
/// The basis is one representative of the equivalence class; anything that
/// consumes it (angles, measures, classifiers) is invariant to right
/// multiplication by O(n). Order equal to the ambient dimension is accepted
/// because a reduction to d = n produces square representatives.
class GrassmannPoint {
 public:
  /// Throws InvalidShape or NotOrthonormal (tolerance kOrthonormalTol).
  explicit GrassmannPoint(Matrix basis);

  const Matrix& basis() const noexcept { return basis_; }
  Eigen::Index ambient() const noexcept { return basis_.rows(); }
  Eigen::Index order() const noexcept { return basis_.cols(); }

  /// Same subspace, basis rotated by an orthogonal n x n matrix.
  GrassmannPoint rotated(const Matrix& h) const;

 private:
  Matrix basis_;
};

/// Canonical angles, ascending, each in [0, pi/2].
struct PrincipalAngles {
  Vector angles;
};

/// The learned D x d orthonormal map together with the configuration that
/// produced it.
class MappingMatrix {
 public:
  /// Requires 1 <= order <= d <= D and W^T W = I within 1e-8.
  explicit MappingMatrix(Matrix w, Eigen::Index order = 1,
                         MeasureKind kind = MeasureKind::ProjectionSq);

  /// W <- I_{D x d}.
  static MappingMatrix truncated_identity(Eigen::Index ambient,
                                          Eigen::Index target,
                                          Eigen::Index order = 1,
                                          MeasureKind kind =
                                              MeasureKind::ProjectionSq);

  const Matrix& w() const noexcept { return w_; }
  Eigen::Index ambient() const noexcept { return w_.rows(); }
  Eigen::Index target() const noexcept { return w_.cols(); }
  Eigen::Index order() const noexcept { return order_; }
  MeasureKind kind() const noexcept { return kind_; }

  /// Copy of the metadata with a new basis.
  MappingMatrix with_basis(Matrix w) const;

 private:
  Matrix w_;
  Eigen::Index order_;
  MeasureKind kind_;
};

/// A horizontal vector at a mapping W: W^T H = 0.
class TangentVector {
 public:
  /// Validates ||W^T H||_F <= 1e-8 * max(1, ||H||_F) against `base`.
  TangentVector(Matrix h, const MappingMatrix& base);

  static TangentVector zero(const MappingMatrix& base);

  const Matrix& h() const noexcept { return h_; }
  double norm() const { return h_.norm(); }

 private:
  Matrix h_;
};

/// Riemannian inner product on the horizontal space: trace(A^T B).
double inner(const TangentVector& a, const TangentVector& b);

struct QrFactors {
  Matrix q;  // D x k, orthonormal columns
  Matrix r;  // k x k, upper triangular, strictly positive diagonal
};

/// Thin QR with the positive-diagonal convention, so the factorization is
/// unique and bit-reproducible. Throws RankDeficient when the smallest
/// singular value is below 1e-12 times the largest.
QrFactors orthonormalize(const Matrix& m);

/// Throws DimensionMismatch.
PrincipalAngles principal_angles(const GrassmannPoint& x1,
                                 const GrassmannPoint& x2,
                                 NumericalHealth* health = nullptr);

double geodesic_distance(const GrassmannPoint& x1, const GrassmannPoint& x2);

/// Closed-form Grassmann geodesic and its parallel transport for a fixed
/// start point and direction. With H = U S V^T (thin SVD):
///   W(t)   = W V cos(S t) V^T + U sin(S t) V^T
///   tau(Z) = (-W V sin(S t) + U cos(S t)) U^T Z + (I - U U^T) Z
/// Build once and evaluate many step lengths during a line search.
class Geodesic {
 public:
  Geodesic(const MappingMatrix& start, const TangentVector& direction);

  /// Point at time t, re-orthonormalized.
  MappingMatrix point(double t) const;

  /// Transport of `z` (tangent at start) to point(t).
  TangentVector transport(const TangentVector& z, double t) const;

 private:
  Matrix raw_point(double t) const;

  MappingMatrix start_;
  Matrix wv_;  // W V
  Matrix u_;
  Vector s_;
  Matrix vt_;
};

MappingMatrix geodesic_step(const MappingMatrix& w, const TangentVector& h,
                            double t);

TangentVector parallel_transport(const TangentVector& hmove,
                                 const MappingMatrix& w0,
                                 const TangentVector& hdir, double t);

/// Seeded D x n standard-normal draw, orthonormalized. Requires 1 <= n < D.
GrassmannPoint random_point(Eigen::Index ambient, Eigen::Index order,
                            std::uint64_t seed);

/// Matrix of i.i.d. standard normals from `rng`.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                       std::mt19937_64& rng);

/// Haar-distributed orthogonal n x n matrix (positive-diagonal QR of a
/// Gaussian draw).
Matrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng);

}  // namespace ggdr
