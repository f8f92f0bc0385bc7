#pragma once

#include <vector>

#include "ggdr/affinity.hpp"
#include "ggdr/manifold.hpp"
#include "ggdr/measure_kind.hpp"
#include "ggdr/types.hpp"

namespace ggdr {

/// Largest fraction of weighted pairs whose gradient may be skipped as
/// SingularPair before an evaluation fails with NumericalFailure.
inline constexpr double kMaxSkippedPairFraction = 0.01;

/// Everything the cost depends on besides W.
struct Problem {
  std::vector<GrassmannPoint> points;
  AffinityGraph graph;
  MeasureKind kind = MeasureKind::ProjectionSq;
  /// Negate similarity-like measures so that within-class similarity is
  /// maximized. Off reproduces the literal weighted sum.
  bool sign_flip_similarity = true;
  Eigen::Index target_dim = 1;

  /// Throws unless all points share (D, n), the graph is N x N and
  /// n <= d <= D.
  void validate() const;

  Eigen::Index ambient() const { return points.front().ambient(); }
  Eigen::Index order() const { return points.front().order(); }

  /// -1 for similarity-like kinds with the flip enabled, else +1.
  double sign() const;
};

/// Q factor of QR(W^T x): the reduced point on G(n, d). Throws RankDeficient.
GrassmannPoint reduce_point(const MappingMatrix& w, const GrassmannPoint& x);

/// sum_{i<j, g(i,j) != 0} g(i,j) * sign * measure(Q_i, Q_j), with each point
/// reduced exactly once. RankDeficient carries the offending sample index.
double cost(const MappingMatrix& w, const Problem& p);
/// Same cost for a raw (not necessarily orthonormal) D x d matrix.
double cost(const Matrix& w, const Problem& p);

/// Euclidean gradient of the cost with respect to W (D x d). Pairs whose
/// gradient is undefined are skipped and counted in `health`; more than 1% of
/// weighted pairs skipped raises NumericalFailure.
Matrix euclidean_grad(const MappingMatrix& w, const Problem& p,
                      NumericalHealth* health = nullptr);
Matrix euclidean_grad(const Matrix& w, const Problem& p,
                      NumericalHealth* health = nullptr);

/// (I - W W^T) eg, evaluated as eg - W (W^T eg).
TangentVector riemannian_grad(const MappingMatrix& w, const Matrix& eg);

}  // namespace ggdr
