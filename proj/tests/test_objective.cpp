#include <gtest/gtest.h>

#include <cmath>

#include "ggdr/error.hpp"
#include "ggdr/metrics.hpp"
#include "ggdr/objective.hpp"
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

Problem random_problem(MeasureKind kind, int n_points, Eigen::Index big,
                       Eigen::Index small, Eigen::Index order, std::mt19937_64& rng) {
  Problem p;
  p.kind = kind;
  p.target_dim = small;
  std::vector<Label> y;
  for (int i = 0; i < n_points; ++i) {
    p.points.emplace_back(oracle::random_basis(big, order, rng));
    y.push_back(i % 2);
  }
  p.graph = build_affinity(y, pairwise_dissimilarity(p.points, kind), default_kw(y), 1);
  return p;
}

// Direct double loop over i < j with reductions recomputed per pair.
double brute_cost(const Matrix& w, const Problem& p) {
  double total = 0.0;
  const double s = (p.kind == MeasureKind::BinetCauchyKernel && p.sign_flip_similarity) ? -1 : 1;
  for (std::size_t i = 0; i < p.points.size(); ++i)
    for (std::size_t j = i + 1; j < p.points.size(); ++j) {
      const int g = p.graph.g(i, j);
      if (!g) continue;
      total += g * s *
               oracle::projector_measure(p.kind, oracle::gs_q(w.transpose() * p.points[i].basis()),
                                         oracle::gs_q(w.transpose() * p.points[j].basis()));
    }
  return total;
}

}  // namespace

TEST(Cost, ZeroGraph) {
  std::mt19937_64 rng(1);
  auto p = random_problem(MeasureKind::ProjectionSq, 4, 8, 4, 2, rng);
  p.graph.g.setZero();
  const auto w = MappingMatrix::truncated_identity(8, 4, 2);
  EXPECT_EQ(cost(w, p), 0.0);
  EXPECT_EQ(euclidean_grad(w, p), Matrix::Zero(8, 4));
}

TEST(Cost, IdenticalWithinPair) {
  std::mt19937_64 rng(2);
  Problem p;
  const GrassmannPoint x(oracle::random_basis(6, 2, rng));
  p.points = {x, x};
  p.graph.g = IntMatrix::Zero(2, 2);
  p.graph.g(0, 1) = p.graph.g(1, 0) = 1;
  p.target_dim = 3;
  const MappingMatrix w(oracle::random_basis(6, 3, rng), 2);
  EXPECT_NEAR(cost(w, p), 0.0, 1e-14);
  EXPECT_LE(euclidean_grad(w, p).norm(), 1e-13);
}

TEST(Cost, HandBuiltThreePoints) {
  // D=4, d=3, n=1 lines; W keeps the first three coordinates.
  Problem p;
  Eigen::Vector4d a(1, 0, 0, 0), b(1, 1, 0, 0), c(0, 1, 1, 1);
  for (auto v : {a, b, c}) p.points.emplace_back(Matrix(v.normalized()));
  p.graph.g = IntMatrix::Zero(3, 3);
  p.graph.g(0, 1) = p.graph.g(1, 0) = 1;
  p.graph.g(0, 2) = p.graph.g(2, 0) = -1;
  p.graph.g(1, 2) = p.graph.g(2, 1) = -1;
  p.target_dim = 3;
  const auto w = MappingMatrix::truncated_identity(4, 3, 1);
  // Reduced lines: (1,0,0), (1,1,0)/sqrt2, (0,1,1)/sqrt2. sin^2 of angles:
  // (a,b) 1/2, (a,c) 1, (b,c) 1 - 1/4.
  EXPECT_NEAR(cost(w, p), 0.5 - 1.0 - 0.75, 1e-14);
  EXPECT_NEAR(cost(w, p), brute_cost(w.w(), p), 1e-14);
}

TEST(Cost, MatchesBruteForceEveryKind) {
  std::mt19937_64 rng(3);
  for (auto kind : kAllMeasureKinds) {
    const auto p = random_problem(kind, 8, 10, 5, 2, rng);
    const Matrix w = oracle::random_basis(10, 5, rng);
    EXPECT_NEAR(cost(w, p), brute_cost(w, p), 1e-10) << short_name(kind);
  }
}

TEST(Cost, BasisAndSampleRotationInvariance) {
  std::mt19937_64 rng(4);
  for (auto kind : kAllMeasureKinds) {
    auto p = random_problem(kind, 6, 10, 5, 2, rng);
    const MappingMatrix w(oracle::random_basis(10, 5, rng), 2, kind);
    const double c0 = cost(w, p);
    const MappingMatrix wh(w.w() * oracle::random_orthogonal(5, rng), 2, kind);
    EXPECT_NEAR(cost(wh, p), c0, 1e-9) << short_name(kind);
    for (auto& x : p.points) x = x.rotated(oracle::random_orthogonal(2, rng));
    EXPECT_NEAR(cost(w, p), c0, 1e-9) << short_name(kind);
  }
}

TEST(EuclideanGrad, MatchesFiniteDifferencesEveryKind) {
  std::mt19937_64 rng(5);
  for (auto kind : kAllMeasureKinds) {
    int checked = 0;
    for (int t = 0; t < 20; ++t) {
      const auto p = random_problem(kind, 6, 10, 5, 2, rng);
      const Matrix w = oracle::random_basis(10, 5, rng);
      NumericalHealth h;
      Matrix g;
      try {
        g = euclidean_grad(w, p, &h);
      } catch (const Error&) {
        continue;
      }
      if (h.total() != 0) continue;
      const Matrix fd = oracle::fd_grad([&](const Matrix& m) { return brute_cost(m, p); }, w);
      EXPECT_LE(oracle::rel_err(g, fd), 1e-5) << short_name(kind) << " trial " << t;
      ++checked;
    }
    EXPECT_GE(checked, 18) << short_name(kind);
  }
}

TEST(EuclideanGrad, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(6);
  const auto p = random_problem(MeasureKind::FubiniStudy, 10, 12, 6, 2, rng);
  const Matrix w = oracle::random_basis(12, 6, rng);
  const double c1 = cost(w, p);
  const Matrix g1 = euclidean_grad(w, p);
  setenv("GGDR_THREADS", "4", 1);
  const double c4 = cost(w, p);
  const Matrix g4 = euclidean_grad(w, p);
  unsetenv("GGDR_THREADS");
  EXPECT_EQ(c1, c4);
  EXPECT_EQ(g1, g4);
}

TEST(RiemannianGrad, Projection) {
  std::mt19937_64 rng(7);
  const MappingMatrix w(oracle::random_basis(9, 4, rng));
  const Matrix m = oracle::normal(4, 4, rng);
  EXPECT_LE(riemannian_grad(w, w.w() * m).norm(), 1e-13);
  Matrix z = oracle::normal(9, 4, rng);
  z -= w.w() * (w.w().transpose() * z);
  EXPECT_LE((riemannian_grad(w, z).h() - z).norm(), 1e-14);
  for (int t = 0; t < 20; ++t) {
    const auto r = riemannian_grad(w, oracle::normal(9, 4, rng));
    EXPECT_LE((w.w().transpose() * r.h()).norm(), 1e-10);
  }
}

TEST(Cost, SignFlipMakesCloserWithinPairCheaper) {
  // Two same-label lines in R^3; rotate the second toward the first.
  for (auto kind : kAllMeasureKinds) {
    double prev = INFINITY;
    for (double angle : {1.2, 0.9, 0.6, 0.3, 0.1}) {
      Problem p;
      p.kind = kind;
      p.target_dim = 3;
      Matrix a(3, 2), b(3, 2);
      a << 1, 0, 0, 1, 0, 0;
      b << std::cos(angle), 0, 0, 1, std::sin(angle), 0;
      p.points = {GrassmannPoint(a), GrassmannPoint(b)};
      p.graph.g = IntMatrix::Zero(2, 2);
      p.graph.g(0, 1) = p.graph.g(1, 0) = 1;
      const double c = cost(MappingMatrix(Matrix::Identity(3, 3), 2, kind), p);
      EXPECT_LT(c, prev) << short_name(kind) << " angle " << angle;
      prev = c;
    }
  }
}

TEST(Cost, LiteralKernelSum) {
  std::mt19937_64 rng(8);
  auto p = random_problem(MeasureKind::BinetCauchyKernel, 6, 9, 4, 2, rng);
  const Matrix w = oracle::random_basis(9, 4, rng);
  const double flipped = cost(w, p);
  p.sign_flip_similarity = false;
  EXPECT_DOUBLE_EQ(cost(w, p), -flipped);
  EXPECT_EQ(p.sign(), 1.0);
}

TEST(Cost, RankDeficientNamesSample) {
  Problem p;
  Matrix a = Matrix::Zero(4, 1), b = Matrix::Zero(4, 1);
  a(0, 0) = 1;
  b(3, 0) = 1;
  p.points = {GrassmannPoint(a), GrassmannPoint(a), GrassmannPoint(b)};
  p.graph.g = IntMatrix::Zero(3, 3);
  p.target_dim = 2;
  const auto w = MappingMatrix::truncated_identity(4, 2, 1);
  try {
    cost(w, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
    EXPECT_EQ(e.sample(), std::optional<std::size_t>(2));
  }
}

TEST(EuclideanGrad, TooManySingularPairsFail) {
  Problem p;
  p.kind = MeasureKind::FubiniStudy;
  Matrix a(3, 2), b(3, 2);
  a << 1, 0, 0, 1, 0, 0;
  b << 1, 0, 0, 0, 0, 1;
  p.points = {GrassmannPoint(a), GrassmannPoint(b)};
  p.graph.g = IntMatrix::Zero(2, 2);
  p.graph.g(0, 1) = p.graph.g(1, 0) = -1;
  p.target_dim = 3;
  NumericalHealth h;
  EXPECT_EQ(kind_of([&] { euclidean_grad(MappingMatrix(Matrix::Identity(3, 3), 2), p, &h); }),
            ErrorKind::NumericalFailure);
  EXPECT_EQ(h.skipped_pairs, 1u);
}

TEST(Problem, Validation) {
  std::mt19937_64 rng(9);
  auto p = random_problem(MeasureKind::ProjectionSq, 4, 8, 4, 2, rng);
  p.target_dim = 1;
  EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::InvalidShape);
  p.target_dim = 9;
  EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::InvalidShape);
  p.target_dim = 4;
  p.graph.g = IntMatrix::Zero(3, 3);
  EXPECT_EQ(kind_of([&] { p.validate(); }), ErrorKind::DimensionMismatch);
  Problem empty;
  EXPECT_EQ(kind_of([&] { empty.validate(); }), ErrorKind::EmptyTrainingSet);
}

TEST(ReducePoint, Examples) {
  // x supported on the first d coordinates with an orthonormal top block.
  Matrix x = Matrix::Zero(5, 2);
  x(0, 0) = 1;
  x(2, 1) = 1;
  const auto w = MappingMatrix::truncated_identity(5, 3, 2);
  EXPECT_EQ(reduce_point(w, GrassmannPoint(x)).basis(), x.topRows(3));

  std::mt19937_64 rng(10);
  const GrassmannPoint y(oracle::random_basis(5, 2, rng));
  const auto full = MappingMatrix::truncated_identity(5, 5, 2);
  EXPECT_LE(oracle::subspace_gap(reduce_point(full, y).basis(), y.basis()), 1e-12);

  const MappingMatrix r(oracle::random_basis(5, 3, rng), 2);
  EXPECT_LE(orthonormality_error(reduce_point(r, y).basis()), 1e-10);
}
