#include "ggdr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ggdr/error.hpp"
#include "ggdr/metrics.hpp"
#include "ggdr/objective.hpp"

namespace ggdr {

void LabeledDataset::validate() const {
  if (samples.size() != labels.size() ||
      (!provenance.empty() && provenance.size() != samples.size())) {
    throw Error(ErrorKind::InvalidShape,
                "dataset has mismatched sample/label/provenance counts");
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].ambient() != samples[0].ambient() ||
        samples[i].order() != samples[0].order()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "sample shape differs from the first sample", i);
    }
  }
}

LabeledDataset LabeledDataset::subset(
    const std::vector<std::size_t>& indices) const {
  LabeledDataset out;
  for (std::size_t i : indices) {
    out.samples.push_back(samples.at(i));
    out.labels.push_back(labels.at(i));
    if (!provenance.empty()) out.provenance.push_back(provenance.at(i));
  }
  return out;
}

void SynthParams::validate() const {
  if (classes < 1 || samples_per_class < 1 || ambient < 2 || order < 1 ||
      order >= ambient || !(within_noise >= 0.0) || nuisance_dim < 0 ||
      nuisance_dim > ambient || !(class_spread >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "synthetic parameters need positive counts, 1 <= n < D, "
                "noise >= 0, spread >= 0 and 0 <= nuisance_dim <= D");
  }
}

GrassmannPoint build_subspace(const Matrix& features, Eigen::Index order,
                              NumericalHealth* health) {
  if (order < 1 || features.cols() < order || features.rows() < order) {
    throw Error(ErrorKind::InvalidShape,
                "cannot keep " + std::to_string(order) +
                    " singular vectors of a " +
                    std::to_string(features.rows()) + "x" +
                    std::to_string(features.cols()) + " feature matrix");
  }
  Eigen::JacobiSVD<Matrix> svd(features, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || !(sv(order - 1) > kRankTol * sv(0))) {
    throw Error(ErrorKind::RankDeficient,
                "feature matrix has rank below " + std::to_string(order));
  }
  if (health && sv.size() > order &&
      sv(order - 1) - sv(order) <= 1e-8 * sv(0)) {
    ++health->degenerate_gaps;
  }
  return GrassmannPoint(svd.matrixU().leftCols(order));
}

std::vector<Prediction> nn_predict(const LabeledDataset& train,
                                   const std::vector<GrassmannPoint>& test,
                                   MeasureKind kind) {
  if (train.samples.empty()) {
    throw Error(ErrorKind::EmptyTrainingSet, "no training samples");
  }
  train.validate();
  const bool similarity = orientation(kind) == Orientation::SimilarityLike;
  std::vector<Prediction> out;
  out.reserve(test.size());
  for (std::size_t t = 0; t < test.size(); ++t) {
    const auto& x = test[t];
    if (x.ambient() != train.samples[0].ambient() ||
        x.order() != train.samples[0].order()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "test sample shape differs from training samples", t);
    }
    Prediction best;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double m = detail::measure(kind, train.samples[i].basis(), x.basis());
      const bool better =
          i == 0 || (similarity ? m > best.score : m < best.score);
      if (better) best = {train.labels[i], i, m};
    }
    out.push_back(best);
  }
  return out;
}

std::vector<Label> nn_classify(const LabeledDataset& train,
                               const std::vector<GrassmannPoint>& test,
                               MeasureKind kind) {
  std::vector<Label> out;
  for (const auto& p : nn_predict(train, test, kind)) out.push_back(p.label);
  return out;
}

LabeledDataset reduce_dataset(const MappingMatrix& w, const LabeledDataset& ds) {
  LabeledDataset out;
  out.labels = ds.labels;
  out.provenance = ds.provenance;
  out.samples.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    try {
      out.samples.push_back(reduce_point(w, ds.samples[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "sample " + std::to_string(i) + ": " + e.what(), i);
    }
  }
  return out;
}

double evaluate(const LabeledDataset& train, const LabeledDataset& test,
                MeasureKind kind, const std::optional<MappingMatrix>& w) {
  if (test.size() == 0) return 0.0;
  const LabeledDataset tr = w ? reduce_dataset(*w, train) : train;
  const LabeledDataset te = w ? reduce_dataset(*w, test) : test;
  const auto pred = nn_classify(tr, te.samples, kind);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == te.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

LabeledDataset synth_dataset(const SynthParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  const bool shared = params.nuisance_dim > 0;
  const Matrix nuisance =
      shared ? orthonormalize(gaussian_matrix(params.ambient,
                                              params.nuisance_dim, rng))
                   .q
             : Matrix();
  const Matrix mean =
      params.class_spread > 0.0
          ? orthonormalize(gaussian_matrix(params.ambient, params.order, rng)).q
          : Matrix();
  LabeledDataset out;
  for (int c = 0; c < params.classes; ++c) {
    Matrix center;
    if (params.class_spread > 0.0) {
      Matrix z = params.class_spread *
                 gaussian_matrix(params.ambient, params.order, rng);
      z -= mean * (mean.transpose() * z);
      center = orthonormalize(mean + z).q;
    } else {
      center =
          orthonormalize(gaussian_matrix(params.ambient, params.order, rng)).q;
    }
    for (int s = 0; s < params.samples_per_class; ++s) {
      const Matrix g = gaussian_matrix(
          shared ? params.nuisance_dim : params.ambient, params.order, rng);
      Matrix step = params.within_noise * (shared ? Matrix(nuisance * g) : g);
      step -= center * (center.transpose() * step);
      out.samples.emplace_back(orthonormalize(center + step).q);
      out.labels.push_back(c);
      out.provenance.push_back("synth:c" + std::to_string(c) + ":s" +
                               std::to_string(s));
    }
  }
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_per_class(
    const LabeledDataset& ds, int train_per_class) {
  std::map<Label, int> seen;
  std::vector<std::size_t> first, second;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (seen[ds.labels[i]]++ < train_per_class ? first : second).push_back(i);
  }
  return {ds.subset(first), ds.subset(second)};
}

TrainResult train(const LabeledDataset& ds, const TrainConfig& cfg) {
  ds.validate();
  if (ds.size() == 0) {
    throw Error(ErrorKind::EmptyTrainingSet, "no training samples");
  }
  const Matrix dist = pairwise_dissimilarity(ds.samples, cfg.kind);
  const int kw = cfg.kw ? *cfg.kw : default_kw(ds.labels);
  Problem p;
  p.points = ds.samples;
  p.graph = build_affinity(ds.labels, dist, kw, cfg.kb);
  p.kind = cfg.kind;
  p.sign_flip_similarity = cfg.sign_flip_similarity;
  p.target_dim = cfg.target_dim;
  p.validate();
  std::optional<MappingMatrix> w0;
  if (cfg.init_seed) w0 = random_initial_map(p, *cfg.init_seed);
  TrainResult out{minimize(p, w0, cfg.optim), p.graph};
  return out;
}

std::vector<int> stratified_folds(const std::vector<Label>& labels, int folds) {
  std::map<Label, int> rank;
  std::vector<int> out;
  out.reserve(labels.size());
  for (Label y : labels) out.push_back(rank[y]++ % folds);
  return out;
}

GridResult grid_search(const LabeledDataset& train_set, int folds,
                       const std::vector<Eigen::Index>& dims,
                       const std::vector<int>& kbs, const TrainConfig& base) {
  train_set.validate();
  if (train_set.size() == 0) {
    throw Error(ErrorKind::EmptyTrainingSet, "no training samples");
  }
  if (dims.empty() || kbs.empty()) {
    throw Error(ErrorKind::InvalidGrid, "empty grid");
  }
  const Eigen::Index amb = train_set.samples[0].ambient();
  const Eigen::Index ord = train_set.samples[0].order();
  for (Eigen::Index d : dims) {
    if (d < ord || d >= amb) {
      throw Error(ErrorKind::InvalidGrid,
                  "grid dimension d=" + std::to_string(d) +
                      " outside [n=" + std::to_string(ord) +
                      ", D=" + std::to_string(amb) + ")");
    }
  }
  if (folds < 2) throw Error(ErrorKind::InvalidGrid, "need at least 2 folds");
  std::map<Label, int> sizes;
  for (Label y : train_set.labels) ++sizes[y];
  for (const auto& [label, count] : sizes) {
    if (count < folds) {
      throw Error(ErrorKind::InvalidGrid,
                  "class " + std::to_string(label) + " has fewer than " +
                      std::to_string(folds) + " samples");
    }
  }

  const auto fold_of = stratified_folds(train_set.labels, folds);
  GridResult out;
  for (Eigen::Index d : dims) {
    for (int kb : kbs) {
      double acc_sum = 0.0;
      for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> fit, held;
        for (std::size_t i = 0; i < train_set.size(); ++i)
          (fold_of[i] == f ? held : fit).push_back(i);
        const LabeledDataset fit_set = train_set.subset(fit);
        const LabeledDataset held_set = train_set.subset(held);
        TrainConfig cfg = base;
        cfg.target_dim = d;
        cfg.kb = kb;
        const TrainResult tr = train(fit_set, cfg);
        acc_sum += evaluate(fit_set, held_set, cfg.kind, tr.optim.w);
      }
      out.cells.push_back({d, kb, acc_sum / folds});
    }
  }
  const GridCell* best = &out.cells.front();
  for (const auto& c : out.cells) {
    const bool better =
        c.accuracy > best->accuracy ||
        (c.accuracy == best->accuracy &&
         (c.d < best->d || (c.d == best->d && c.kb < best->kb)));
    if (better) best = &c;
  }
  out.best_d = best->d;
  out.best_kb = best->kb;
  return out;
}

double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-12});
}

Matrix finite_difference_grad(const Matrix& w, const Problem& p, double step) {
  Matrix g(w.rows(), w.cols());
  Matrix probe = w;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      const double orig = probe(i, j);
      probe(i, j) = orig + step;
      const double up = cost(probe, p);
      probe(i, j) = orig - step;
      const double down = cost(probe, p);
      probe(i, j) = orig;
      g(i, j) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

GradientCheckReport gradient_check(MeasureKind kind, Eigen::Index ambient,
                                   Eigen::Index target, Eigen::Index order,
                                   int trials, std::uint64_t seed,
                                   const GradientCheckOptions& opts) {
  if (order < 1 || order > target || target >= ambient || opts.points < 4) {
    throw Error(ErrorKind::InvalidShape,
                "gradient check needs 1 <= n <= d < D and at least 4 points");
  }
  GradientCheckReport report;
  report.kind = kind;
  report.trials = trials;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    Problem p;
    p.kind = kind;
    p.target_dim = target;
    std::vector<Label> labels;
    for (int i = 0; i < opts.points; ++i) {
      p.points.emplace_back(
          orthonormalize(gaussian_matrix(ambient, order, rng)).q);
      labels.push_back(i % 2);
    }
    if (opts.inject_near_identical) {
      Matrix step = 1e-9 * gaussian_matrix(ambient, order, rng);
      const Matrix& x0 = p.points[0].basis();
      step -= x0 * (x0.transpose() * step);
      p.points.emplace_back(orthonormalize(x0 + step).q);
      labels.push_back(labels[0]);
    }
    const Matrix w = orthonormalize(gaussian_matrix(ambient, target, rng)).q;
    const Matrix dist = pairwise_dissimilarity(p.points, kind);
    p.graph = build_affinity(labels, dist, default_kw(labels), 1);
    if (opts.inject_near_identical) {
      const auto last = static_cast<Eigen::Index>(p.points.size() - 1);
      p.graph.g(0, last) = p.graph.g(last, 0) = 1;
    }

    NumericalHealth health;
    Matrix analytic;
    try {
      analytic = euclidean_grad(w, p, &health);
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::Numerical) throw;
      ++health.skipped_pairs;
    }
    report.health += health;
    if (health.total() > 0) {
      ++report.guarded;
      continue;
    }
    if (opts.corrupt_gradient) analytic(0, 0) += 1.0 + std::abs(analytic(0, 0));
    const Matrix fd = finite_difference_grad(w, p, opts.fd_step);
    const double rel = relative_error(analytic, fd);
    ++report.checked;
    report.max_rel_error = std::max(report.max_rel_error, rel);
    if (!(rel <= opts.tolerance)) ++report.failures;
  }
  return report;
}

}  // namespace ggdr
