#include "ggdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ggdr/error.hpp"

namespace ggdr {

std::string_view short_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::ProjectionSq: return "pro";
    case MeasureKind::FubiniStudy: return "fs";
    case MeasureKind::BinetCauchyDistSq: return "bc";
    case MeasureKind::ProjectionKernelDistSq: return "pk";
    case MeasureKind::BinetCauchyKernel: return "bck";
  }
  return "?";
}

std::string_view long_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::ProjectionSq: return "ProjectionSq";
    case MeasureKind::FubiniStudy: return "FubiniStudy";
    case MeasureKind::BinetCauchyDistSq: return "BinetCauchyDistSq";
    case MeasureKind::ProjectionKernelDistSq: return "ProjectionKernelDistSq";
    case MeasureKind::BinetCauchyKernel: return "BinetCauchyKernel";
  }
  return "?";
}

std::optional<MeasureKind> parse_measure_kind(std::string_view name) {
  for (MeasureKind kind : kAllMeasureKinds) {
    if (name == short_name(kind) || name == long_name(kind)) return kind;
  }
  if (name == "p" || name == "projection") return MeasureKind::ProjectionSq;
  return std::nullopt;
}

namespace {

void check_pair(const Matrix& q1, const Matrix& q2) {
  if (q1.rows() != q2.rows() || q1.cols() != q2.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                "measure between " + std::to_string(q1.rows()) + "x" +
                    std::to_string(q1.cols()) + " and " +
                    std::to_string(q2.rows()) + "x" +
                    std::to_string(q2.cols()));
  }
}

// adj(B) for symmetric positive semidefinite B, i.e. det(B) B^{-1} without
// the inverse: with B = V diag(l) V^T, adj(B) = V diag(prod_{j != i} l_j) V^T.
Matrix psd_adjugate(const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  const Vector& l = eig.eigenvalues();
  Vector cof(l.size());
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    double p = 1.0;
    for (Eigen::Index j = 0; j < l.size(); ++j)
      if (j != i) p *= l(j);
    cof(i) = p;
  }
  return eig.eigenvectors() * cof.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

namespace detail {

double measure(MeasureKind kind, const Matrix& q1, const Matrix& q2) {
  const Matrix a = q1.transpose() * q2;
  const double n = static_cast<double>(a.rows());
  switch (kind) {
    case MeasureKind::ProjectionSq:
      return n - a.squaredNorm();
    case MeasureKind::FubiniStudy:
      return std::acos(std::clamp(std::abs(a.determinant()), 0.0, 1.0));
    case MeasureKind::BinetCauchyDistSq:
      return 2.0 - 2.0 * std::abs(a.determinant());
    case MeasureKind::ProjectionKernelDistSq:
      return 2.0 * n - 2.0 * a.squaredNorm();
    case MeasureKind::BinetCauchyKernel:
      return (a * a.transpose()).determinant();
  }
  return 0.0;
}

PairGradient measure_grad(MeasureKind kind, const Matrix& q1, const Matrix& q2,
                          NumericalHealth* health) {
  const Matrix a = q1.transpose() * q2;
  PairGradient out;
  switch (kind) {
    case MeasureKind::ProjectionSq:
      // Q2 Q2^T Q1 = Q2 A^T
      out.g1 = 2.0 * (q1 - q2 * a.transpose());
      out.g2 = 2.0 * (q2 - q1 * a);
      break;
    case MeasureKind::ProjectionKernelDistSq:
      out.g1 = -4.0 * q2 * a.transpose();
      out.g2 = -4.0 * q1 * a;
      break;
    case MeasureKind::FubiniStudy:
    case MeasureKind::BinetCauchyDistSq: {
      Eigen::PartialPivLU<Matrix> lu(a);
      const double det = lu.determinant();
      double abs_det = std::abs(det);
      if (!(abs_det >= kSingularDet)) {
        throw Error(ErrorKind::SingularPair,
                    "|det(Q1^T Q2)| = " + std::to_string(abs_det) +
                        " is numerically zero");
      }
      const Matrix inv_t = lu.inverse().transpose();
      Matrix dl_da;
      if (kind == MeasureKind::FubiniStudy) {
        if (abs_det > 1.0 - kSingularDet) {
          abs_det = 1.0 - kSingularDet;
          if (health) ++health->clamped_determinants;
        }
        dl_da = (-abs_det / std::sqrt(1.0 - abs_det * abs_det)) * inv_t;
      } else {
        dl_da = (-2.0 * abs_det) * inv_t;
      }
      out.g1 = q2 * dl_da.transpose();
      out.g2 = q1 * dl_da;
      break;
    }
    case MeasureKind::BinetCauchyKernel: {
      // L = det(B), B = A A^T; dL/dB = det(B) B^{-1} = adj(B).
      const Matrix dl_db = psd_adjugate(a * a.transpose());
      const Matrix sym = dl_db + dl_db.transpose();
      out.g1 = q2 * a.transpose() * sym;
      out.g2 = q1 * sym * a;
      break;
    }
  }
  return out;
}

Matrix qr_pullback_q(const Matrix& q, const Matrix& r, const Matrix& dq) {
  const Matrix m = q.transpose() * dq;
  const Matrix p = dq - q * m + q * btril(m);
  // P R^{-T}: solve R Z^T = P^T.
  return r.triangularView<Eigen::Upper>().solve(p.transpose()).transpose();
}

}  // namespace detail

double measure(MeasureKind kind, const GrassmannPoint& q1,
               const GrassmannPoint& q2) {
  check_pair(q1.basis(), q2.basis());
  return detail::measure(kind, q1.basis(), q2.basis());
}

PairGradient measure_grad(MeasureKind kind, const GrassmannPoint& q1,
                          const GrassmannPoint& q2, NumericalHealth* health) {
  check_pair(q1.basis(), q2.basis());
  return detail::measure_grad(kind, q1.basis(), q2.basis(), health);
}

Matrix atril(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::NotSquare, "atril");
  const Matrix lower = a.triangularView<Eigen::StrictlyLower>();
  return lower - lower.transpose();
}

Matrix btril(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::NotSquare, "btril");
  const Matrix lower = a.triangularView<Eigen::StrictlyLower>();
  const Matrix lower_t = a.transpose().triangularView<Eigen::StrictlyLower>();
  return lower - lower_t;
}

Matrix qr_pullback(const Matrix& x, const Matrix& q, const Matrix& r,
                   const Matrix& dq, const Matrix& dr) {
  const Eigen::Index k = q.cols();
  if (x.rows() != q.rows() || x.cols() != k || r.rows() != k ||
      r.cols() != k || dq.rows() != q.rows() || dq.cols() != k ||
      dr.rows() != k || dr.cols() != k) {
    throw Error(ErrorKind::DimensionMismatch, "qr_pullback operand shapes");
  }
  const Vector diag = r.diagonal().cwiseAbs();
  if (!(diag.minCoeff() > 1e-14 * diag.maxCoeff())) {
    throw Error(ErrorKind::SingularR, "R has a (numerically) zero pivot");
  }
  const auto rt = r.triangularView<Eigen::Upper>();
  const Matrix dr_part =
      dr - rt.solve(btril(dr * r.transpose()).transpose()).transpose();
  return detail::qr_pullback_q(q, r, dq) + q * dr_part;
}

Matrix pair_grad_w(MeasureKind kind, const Matrix& w, const GrassmannPoint& x1,
                   const GrassmannPoint& x2, NumericalHealth* health) {
  check_pair(x1.basis(), x2.basis());
  if (w.rows() != x1.ambient()) {
    throw Error(ErrorKind::DimensionMismatch, "W rows differ from ambient D");
  }
  const QrFactors f1 = orthonormalize(w.transpose() * x1.basis());
  const QrFactors f2 = orthonormalize(w.transpose() * x2.basis());
  const PairGradient g = detail::measure_grad(kind, f1.q, f2.q, health);
  // dL/dW = X dL/dY^T, once per side.
  return x1.basis() * detail::qr_pullback_q(f1.q, f1.r, g.g1).transpose() +
         x2.basis() * detail::qr_pullback_q(f2.q, f2.r, g.g2).transpose();
}

Matrix pair_grad_w(MeasureKind kind, const MappingMatrix& w,
                   const GrassmannPoint& x1, const GrassmannPoint& x2,
                   NumericalHealth* health) {
  return pair_grad_w(kind, w.w(), x1, x2, health);
}

}  // namespace ggdr
