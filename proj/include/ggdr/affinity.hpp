#pragma once

#include <vector>

#include "ggdr/manifold.hpp"
#include "ggdr/measure_kind.hpp"
#include "ggdr/types.hpp"

namespace ggdr {

using Label = int;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Supervision graph G = G_w - G_b with entries in {-1, 0, +1}: +1 links a
/// point to one of its kw nearest same-label points, -1 to one of its kb
/// nearest different-label points (either direction of the relation).
struct AffinityGraph {
  IntMatrix g;
  int kw = 1;
  int kb = 1;

  Eigen::Index size() const { return g.rows(); }
};

/// Requires a symmetric nonnegative `dist` with zero diagonal, every class of
/// size >= 2 (DegenerateClass) and 1 <= kb <= kw <= min class size - 1
/// (InvalidK). Neighbors exclude the point itself; ties go to the lower
/// sample index. A point with fewer than kb different-label points links to
/// all of them.
AffinityGraph build_affinity(const std::vector<Label>& labels,
                             const Matrix& dist, int kw, int kb);

/// Smallest class size minus one (self excluded). Throws DegenerateClass.
int default_kw(const std::vector<Label>& labels);

/// Pairwise dissimilarity on the original manifold under `kind`: the measure
/// itself for distance-like kinds and 1 - k for the Binet-Cauchy kernel, so
/// "nearest" always means smallest. Rows may be evaluated on several threads
/// (GGDR_THREADS); the result does not depend on the thread count.
Matrix pairwise_dissimilarity(const std::vector<GrassmannPoint>& points,
                              MeasureKind kind);

}  // namespace ggdr
