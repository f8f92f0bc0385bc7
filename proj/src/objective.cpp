#include "ggdr/objective.hpp"

#include <string>

#include "ggdr/error.hpp"
#include "ggdr/metrics.hpp"
#include "parallel.hpp"

namespace ggdr {

void Problem::validate() const {
  if (points.empty()) {
    throw Error(ErrorKind::EmptyTrainingSet, "problem has no points");
  }
  const Eigen::Index amb = points.front().ambient();
  const Eigen::Index ord = points.front().order();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].ambient() != amb || points[i].order() != ord) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sample shape differs from the first sample", i);
    }
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  if (graph.g.rows() != n || graph.g.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "affinity graph is " + std::to_string(graph.g.rows()) + "x" +
                    std::to_string(graph.g.cols()) + " for " +
                    std::to_string(n) + " samples");
  }
  if (target_dim < ord || target_dim > amb) {
    throw Error(ErrorKind::InvalidShape,
                "target dimension d=" + std::to_string(target_dim) +
                    " must satisfy n=" + std::to_string(ord) +
                    " <= d <= D=" + std::to_string(amb));
  }
}

double Problem::sign() const {
  return sign_flip_similarity &&
                 orientation(kind) == Orientation::SimilarityLike
             ? -1.0
             : 1.0;
}

GrassmannPoint reduce_point(const MappingMatrix& w, const GrassmannPoint& x) {
  if (w.ambient() != x.ambient()) {
    throw Error(ErrorKind::DimensionMismatch, "W rows differ from sample D");
  }
  return GrassmannPoint(orthonormalize(w.w().transpose() * x.basis()).q);
}

namespace {

void check_map(const Matrix& w, const Problem& p) {
  p.validate();
  if (w.rows() != p.ambient() || w.cols() != p.target_dim) {
    throw Error(ErrorKind::DimensionMismatch,
                "W is " + std::to_string(w.rows()) + "x" +
                    std::to_string(w.cols()) + ", problem expects " +
                    std::to_string(p.ambient()) + "x" +
                    std::to_string(p.target_dim));
  }
}

std::vector<QrFactors> reduce_all(const Matrix& w, const Problem& p) {
  std::vector<QrFactors> out(p.points.size());
  detail::parallel_for(p.points.size(), [&](std::size_t i) {
    try {
      out[i] = orthonormalize(w.transpose() * p.points[i].basis());
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "reduced sample " + std::to_string(i) + ": " + e.what(), i);
    }
  });
  return out;
}

}  // namespace

double cost(const Matrix& w, const Problem& p) {
  check_map(w, p);
  const auto reduced = reduce_all(w, p);
  const double s = p.sign();
  const Eigen::Index n = p.graph.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int g = p.graph.g(i, j);
      if (g == 0) continue;
      total += g * s * detail::measure(p.kind, reduced[i].q, reduced[j].q);
    }
  }
  return total;
}

double cost(const MappingMatrix& w, const Problem& p) { return cost(w.w(), p); }

Matrix euclidean_grad(const Matrix& w, const Problem& p,
                      NumericalHealth* health) {
  check_map(w, p);
  const auto reduced = reduce_all(w, p);
  const double s = p.sign();
  const Eigen::Index n = p.graph.size();
  const Eigen::Index ord = p.order();

  // dL/dQ_i accumulated over all pairs touching i, then pulled back through
  // QR once per sample (the pullback is linear in dL/dQ).
  std::vector<Matrix> dq(n, Matrix::Zero(p.target_dim, ord));
  NumericalHealth local;
  std::size_t weighted = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int g = p.graph.g(i, j);
      if (g == 0) continue;
      ++weighted;
      try {
        const PairGradient pg =
            detail::measure_grad(p.kind, reduced[i].q, reduced[j].q, &local);
        dq[i] += (g * s) * pg.g1;
        dq[j] += (g * s) * pg.g2;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularPair) throw;
        ++local.skipped_pairs;
      }
    }
  }
  if (health) *health += local;
  if (local.skipped_pairs >
      kMaxSkippedPairFraction * static_cast<double>(weighted)) {
    throw Error(ErrorKind::NumericalFailure,
                std::to_string(local.skipped_pairs) + " of " +
                    std::to_string(weighted) +
                    " weighted pairs have an undefined gradient");
  }

  Matrix grad = Matrix::Zero(w.rows(), w.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dq[i].isZero(0.0)) continue;
    grad += p.points[i].basis() *
            detail::qr_pullback_q(reduced[i].q, reduced[i].r, dq[i]).transpose();
  }
  return grad;
}

Matrix euclidean_grad(const MappingMatrix& w, const Problem& p,
                      NumericalHealth* health) {
  return euclidean_grad(w.w(), p, health);
}

TangentVector riemannian_grad(const MappingMatrix& w, const Matrix& eg) {
  if (eg.rows() != w.ambient() || eg.cols() != w.target()) {
    throw Error(ErrorKind::DimensionMismatch, "gradient shape differs from W");
  }
  return TangentVector(eg - w.w() * (w.w().transpose() * eg), w);
}

}  // namespace ggdr
