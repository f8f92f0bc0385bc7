#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "ggdr/affinity.hpp"
#include "ggdr/error.hpp"
#include "ggdr/metrics.hpp"
#include "oracles.hpp"

using namespace ggdr;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& err) {
    return err.kind();
  }
  ADD_FAILURE() << "no ggdr::Error thrown";
  return ErrorKind::Io;
}

Matrix random_dist(int n, std::mt19937_64& rng) {
  Matrix d = oracle::normal(n, n, rng).cwiseAbs();
  d = (d + d.transpose()).eval();
  d.diagonal().setZero();
  return d;
}

// Exhaustive neighbor enumeration: for each i, sort all other indices by
// (distance, index) and keep the first k that satisfy the label predicate.
IntMatrix brute_force(const std::vector<Label>& y, const Matrix& d, int kw, int kb) {
  const int n = static_cast<int>(y.size());
  IntMatrix gw = IntMatrix::Zero(n, n), gb = IntMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < n; ++j)
      if (j != i) order.push_back({d(i, j), j});
    std::sort(order.begin(), order.end());
    int w = 0, b = 0;
    for (auto [dist, j] : order) {
      if (y[j] == y[i] && w < kw) {
        gw(i, j) = gw(j, i) = 1;
        ++w;
      } else if (y[j] != y[i] && b < kb) {
        gb(i, j) = gb(j, i) = 1;
        ++b;
      }
    }
  }
  return gw - gb;
}

}  // namespace

TEST(BuildAffinity, TwoSameLabelPoints) {
  Matrix d(2, 2);
  d << 0, 1, 1, 0;
  const auto g = build_affinity({0, 0}, d, 1, 1);
  IntMatrix expect(2, 2);
  expect << 0, 1, 1, 0;
  EXPECT_EQ(g.g, expect);
}

TEST(BuildAffinity, SingletonClasses) {
  Matrix d(2, 2);
  d << 0, 1, 1, 0;
  EXPECT_EQ(kind_of([&] { build_affinity({0, 1}, d, 1, 1); }), ErrorKind::DegenerateClass);
}

TEST(BuildAffinity, HandBuiltFourPoints) {
  // Twins (0,1) and (2,3); the closest cross pair is (1,2), then (0,2).
  Matrix d(4, 4);
  d << 0.0, 0.1, 0.5, 0.9,
       0.1, 0.0, 0.3, 0.8,
       0.5, 0.3, 0.0, 0.2,
       0.9, 0.8, 0.2, 0.0;
  const auto g = build_affinity({0, 0, 1, 1}, d, 1, 1);
  IntMatrix expect(4, 4);
  // 0 -> nearest other-label is 2; 1 -> 2; 2 -> 1; 3 -> 1.
  expect << 0, 1, -1, 0,
            1, 0, -1, -1,
            -1, -1, 0, 1,
            0, -1, 1, 0;
  EXPECT_EQ(g.g, expect);
  EXPECT_EQ(g.g, brute_force({0, 0, 1, 1}, d, 1, 1));
}

TEST(BuildAffinity, TiesGoToLowerIndex) {
  Matrix d = Matrix::Ones(4, 4);
  d.diagonal().setZero();
  d.conservativeResize(5, 5);
  d.row(4).setOnes();
  d.col(4).setOnes();
  d(4, 4) = 0;
  const auto g = build_affinity({0, 0, 0, 1, 1}, Matrix(d), 1, 1);
  // Point 2's nearest same-label neighbor is 0 (tie with 1); points 0-2
  // pick 3 over 4 as other-label neighbor, and point 4 picks 0.
  EXPECT_EQ(g.g(2, 0), 1);
  EXPECT_EQ(g.g(2, 1), 0);
  EXPECT_EQ(g.g.col(3).head(3), Eigen::Vector3i(-1, -1, -1));
  EXPECT_EQ(g.g.col(4).head(3), Eigen::Vector3i(-1, 0, 0));
}

TEST(BuildAffinity, MatchesBruteForceAndInvariants) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    std::vector<Label> y;
    for (int c = 0; c < 3; ++c)
      for (int s = 0; s < 4 + (t + c) % 3; ++s) y.push_back(c * 7 - 2);
    std::shuffle(y.begin(), y.end(), rng);
    const Matrix d = random_dist(static_cast<int>(y.size()), rng);
    const int kw = 1 + t % 3, kb = 1 + t % kw;
    const auto g = build_affinity(y, d, kw, kb);
    EXPECT_EQ(g.g, brute_force(y, d, kw, kb));
    EXPECT_EQ(g.g, g.g.transpose());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      EXPECT_EQ(g.g(i, i), 0);
      for (Eigen::Index j = 0; j < g.size(); ++j) {
        if (g.g(i, j) == 1) EXPECT_EQ(y[i], y[j]);
        if (g.g(i, j) == -1) EXPECT_NE(y[i], y[j]);
      }
    }
  }
}

TEST(BuildAffinity, MonotoneInK) {
  std::mt19937_64 rng(4);
  std::vector<Label> y;
  for (int c = 0; c < 3; ++c)
    for (int s = 0; s < 6; ++s) y.push_back(c);
  const Matrix d = random_dist(18, rng);
  for (int kw = 1; kw < 5; ++kw) {
    const auto small = build_affinity(y, d, kw, 1);
    const auto big = build_affinity(y, d, kw + 1, 1);
    EXPECT_TRUE(((small.g.array() == 1) <= (big.g.array() == 1)).all());
  }
  for (int kb = 1; kb < 5; ++kb) {
    const auto small = build_affinity(y, d, 5, kb);
    const auto big = build_affinity(y, d, 5, kb + 1);
    EXPECT_TRUE(((small.g.array() == -1) <= (big.g.array() == -1)).all());
  }
}

TEST(BuildAffinity, PermutationEquivariant) {
  std::mt19937_64 rng(5);
  std::vector<Label> y = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  const Matrix d = random_dist(9, rng);
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Label> yp(9);
  Matrix dp(9, 9);
  for (int i = 0; i < 9; ++i) {
    yp[i] = y[perm[i]];
    for (int j = 0; j < 9; ++j) dp(i, j) = d(perm[i], perm[j]);
  }
  const auto g = build_affinity(y, d, 2, 2);
  const auto gp = build_affinity(yp, dp, 2, 2);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) EXPECT_EQ(gp.g(i, j), g.g(perm[i], perm[j]));
}

TEST(BuildAffinity, Validation) {
  Matrix d = Matrix::Ones(4, 4);
  d.diagonal().setZero();
  const std::vector<Label> y = {0, 0, 1, 1};
  EXPECT_EQ(kind_of([&] { build_affinity(y, d, 2, 1); }), ErrorKind::InvalidK);
  EXPECT_EQ(kind_of([&] { build_affinity(y, d, 0, 1); }), ErrorKind::InvalidK);
  EXPECT_EQ(kind_of([&] { build_affinity(y, d, 1, 2); }), ErrorKind::InvalidK);
  EXPECT_EQ(kind_of([&] { build_affinity(y, d, 1, 0); }), ErrorKind::InvalidK);
  EXPECT_EQ(kind_of([&] { build_affinity({0, 0, 0}, Matrix(d), 1, 1); }),
            ErrorKind::DimensionMismatch);
  Matrix asym = d;
  asym(0, 1) = 2.0;
  EXPECT_EQ(kind_of([&] { build_affinity(y, asym, 1, 1); }), ErrorKind::InvalidArgument);
  Matrix diag = d;
  diag(2, 2) = 0.5;
  EXPECT_EQ(kind_of([&] { build_affinity(y, diag, 1, 1); }), ErrorKind::InvalidArgument);
  // One class only: no different-label neighbors exist, so no -1 entries.
  const auto one = build_affinity({0, 0, 0, 0}, Matrix(d), 3, 2);
  EXPECT_EQ(one.g, IntMatrix::Ones(4, 4) - IntMatrix::Identity(4, 4));
}

TEST(DefaultKw, Examples) {
  EXPECT_EQ(default_kw({0, 0, 0, 1, 1}), 1);
  EXPECT_EQ(default_kw(std::vector<Label>(6, 3)), 5);
  std::vector<Label> six;
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < 6; ++s) six.push_back(c);
  EXPECT_EQ(default_kw(six), 5);
  EXPECT_EQ(default_kw({9, 9}), 1);
  EXPECT_EQ(kind_of([] { default_kw({0, 0, 1}); }), ErrorKind::DegenerateClass);
}

TEST(PairwiseDissimilarity, MatchesMeasureAndThreadCountFree) {
  std::mt19937_64 rng(6);
  std::vector<GrassmannPoint> pts;
  for (int i = 0; i < 7; ++i) pts.emplace_back(oracle::random_basis(9, 2, rng));
  for (auto kind : kAllMeasureKinds) {
    const Matrix d = pairwise_dissimilarity(pts, kind);
    for (int i = 0; i < 7; ++i) {
      EXPECT_EQ(d(i, i), 0.0);
      for (int j = 0; j < 7; ++j) {
        if (i == j) continue;
        const double m = measure(kind, pts[i], pts[j]);
        EXPECT_NEAR(d(i, j), kind == MeasureKind::BinetCauchyKernel ? 1.0 - m : m, 1e-15);
        EXPECT_EQ(d(i, j), d(j, i));
      }
    }
  }
  const Matrix one = pairwise_dissimilarity(pts, MeasureKind::FubiniStudy);
  setenv("GGDR_THREADS", "3", 1);
  const Matrix three = pairwise_dissimilarity(pts, MeasureKind::FubiniStudy);
  unsetenv("GGDR_THREADS");
  EXPECT_EQ(one, three);
}
