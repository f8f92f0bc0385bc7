#include "ggdr/affinity.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "ggdr/error.hpp"
#include "ggdr/metrics.hpp"
#include "parallel.hpp"

namespace ggdr {

namespace {

std::map<Label, int> class_sizes(const std::vector<Label>& labels) {
  std::map<Label, int> sizes;
  for (Label y : labels) ++sizes[y];
  return sizes;
}

int min_class_size(const std::vector<Label>& labels) {
  const auto sizes = class_sizes(labels);
  if (sizes.empty()) {
    throw Error(ErrorKind::DegenerateClass, "no samples");
  }
  int smallest = labels.size();
  for (const auto& [label, count] : sizes) {
    if (count < 2) {
      throw Error(ErrorKind::DegenerateClass,
                  "class " + std::to_string(label) + " has a single sample");
    }
    smallest = std::min(smallest, count);
  }
  return smallest;
}

// Indices j != i satisfying `keep`, ordered by (dist(i, j), j).
std::vector<Eigen::Index> nearest(const Matrix& dist, Eigen::Index i, int k,
                                  auto keep) {
  std::vector<Eigen::Index> cand;
  for (Eigen::Index j = 0; j < dist.cols(); ++j)
    if (j != i && keep(j)) cand.push_back(j);
  std::stable_sort(cand.begin(), cand.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     return dist(i, a) < dist(i, b);
                   });
  cand.resize(std::min<std::size_t>(cand.size(), k));
  return cand;
}

}  // namespace

int default_kw(const std::vector<Label>& labels) {
  return min_class_size(labels) - 1;
}

AffinityGraph build_affinity(const std::vector<Label>& labels,
                             const Matrix& dist, int kw, int kb) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (dist.rows() != n || dist.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "distance matrix does not match the number of labels");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist(i, i) != 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "distance matrix diagonal must be zero", i);
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (dist(i, j) != dist(j, i) || dist(i, j) < 0.0) {
        throw Error(ErrorKind::InvalidArgument,
                    "distance matrix must be symmetric and nonnegative", i);
      }
    }
  }
  const int smallest = min_class_size(labels);
  if (kw < 1 || kw > smallest - 1) {
    throw Error(ErrorKind::InvalidK,
                "kw=" + std::to_string(kw) + " outside [1, " +
                    std::to_string(smallest - 1) + "]");
  }
  if (kb < 1 || kb > kw) {
    throw Error(ErrorKind::InvalidK, "kb=" + std::to_string(kb) +
                                         " outside [1, kw=" +
                                         std::to_string(kw) + "]");
  }
  AffinityGraph out;
  out.kw = kw;
  out.kb = kb;
  out.g = IntMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto same = nearest(dist, i, kw,
                              [&](Eigen::Index j) { return labels[j] == labels[i]; });
    const auto diff = nearest(dist, i, kb,
                              [&](Eigen::Index j) { return labels[j] != labels[i]; });
    for (Eigen::Index j : same) out.g(i, j) = out.g(j, i) = 1;
    for (Eigen::Index j : diff) out.g(i, j) = out.g(j, i) = -1;
  }
  return out;
}

Matrix pairwise_dissimilarity(const std::vector<GrassmannPoint>& points,
                              MeasureKind kind) {
  const auto n = static_cast<Eigen::Index>(points.size());
  for (const auto& p : points) {
    if (p.ambient() != points.front().ambient() ||
        p.order() != points.front().order()) {
      throw Error(ErrorKind::DimensionMismatch, "points differ in shape");
    }
  }
  Matrix dist = Matrix::Zero(n, n);
  const bool similarity = orientation(kind) == Orientation::SimilarityLike;
  detail::parallel_for(n, [&](Eigen::Index i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double m =
          detail::measure(kind, points[i].basis(), points[j].basis());
      dist(i, j) = std::max(0.0, similarity ? 1.0 - m : m);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) dist(j, i) = dist(i, j);
  return dist;
}

}  // namespace ggdr
