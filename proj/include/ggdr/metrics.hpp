#pragma once

#include "ggdr/manifold.hpp"
#include "ggdr/measure_kind.hpp"
#include "ggdr/types.hpp"

namespace ggdr {

/// |det A| below this makes the Fubini-Study and Binet-Cauchy distance
/// gradients undefined (SingularPair).
inline constexpr double kSingularDet = 1e-12;

/// d x n gradients of a pair measure with respect to both representatives.
struct PairGradient {
  Matrix g1;
  Matrix g2;
};

/// Subspace measure computed from the n x n product A = q1^T q2:
///   ProjectionSq            n - ||A||_F^2
///   FubiniStudy             arccos |det A|
///   BinetCauchyDistSq       2 - 2 |det A|
///   ProjectionKernelDistSq  2n - 2 ||A||_F^2
///   BinetCauchyKernel       det(A A^T)
double measure(MeasureKind kind, const GrassmannPoint& q1,
               const GrassmannPoint& q2);

/// Closed-form gradients with respect to q1 and q2.
///
/// Throws SingularPair when |det A| < 1e-12 for FubiniStudy or
/// BinetCauchyDistSq. For FubiniStudy, |det A| above 1 - 1e-12 (near
/// identical subspaces) is clamped and counted in `health`.
PairGradient measure_grad(MeasureKind kind, const GrassmannPoint& q1,
                          const GrassmannPoint& q2,
                          NumericalHealth* health = nullptr);

/// tril(A) - tril(A)^T, with tril keeping the strictly lower triangle.
Matrix atril(const Matrix& a);
/// tril(A) - tril(A^T), strictly lower triangular.
Matrix btril(const Matrix& a);

/// Reverse-mode derivative through X = QR (positive-diagonal thin QR):
///   dL/dX = ((I - QQ^T) dQ + Q btril(Q^T dQ)) R^{-T}
///         + Q (dR - btril(dR R^T) R^{-T})
/// where dQ = dL/dQ and dR = dL/dR. Throws SingularR.
Matrix qr_pullback(const Matrix& x, const Matrix& q, const Matrix& r,
                   const Matrix& dq, const Matrix& dr);

/// D x d Euclidean gradient of measure(kind, QR(W^T x1).Q, QR(W^T x2).Q)
/// with respect to W. `w` need not be orthonormal, which lets finite
/// differences probe it directly.
Matrix pair_grad_w(MeasureKind kind, const Matrix& w, const GrassmannPoint& x1,
                   const GrassmannPoint& x2, NumericalHealth* health = nullptr);
Matrix pair_grad_w(MeasureKind kind, const MappingMatrix& w,
                   const GrassmannPoint& x1, const GrassmannPoint& x2,
                   NumericalHealth* health = nullptr);

namespace detail {

// Unchecked forms on raw orthonormal representatives; shapes must agree.
double measure(MeasureKind kind, const Matrix& q1, const Matrix& q2);
PairGradient measure_grad(MeasureKind kind, const Matrix& q1, const Matrix& q2,
                          NumericalHealth* health);

// dL/dY for Y = Q R given dL/dQ only (the measures never depend on R).
Matrix qr_pullback_q(const Matrix& q, const Matrix& r, const Matrix& dq);

}  // namespace detail

}  // namespace ggdr
