#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ggdr/affinity.hpp"
#include "ggdr/manifold.hpp"
#include "ggdr/measure_kind.hpp"
#include "ggdr/optimizer.hpp"

namespace ggdr {

struct LabeledDataset {
  std::vector<GrassmannPoint> samples;
  std::vector<Label> labels;
  std::vector<std::string> provenance;

  std::size_t size() const { return samples.size(); }
  /// Lengths match and all samples share (D, n).
  void validate() const;
  LabeledDataset subset(const std::vector<std::size_t>& indices) const;
};

/// Synthetic classes. Each sample is orth(C + (I - C C^T) Z) for its class
/// center C and a random step Z with N(0, noise^2) entries.
///
/// With nuisance_dim = 0 the step is isotropic in R^D. With nuisance_dim = k
/// it is B G for one k-dimensional basis B shared by every class (G is
/// k x n), so within-class variation lives along common directions that a
/// projection can discard.
///
/// With class_spread = 0 the centers are independent random subspaces.
/// With class_spread = s > 0 every center is orth(M + (I - M M^T) S) for one
/// shared subspace M and S with N(0, s^2) entries.
struct SynthParams {
  int classes = 8;
  int samples_per_class = 10;
  Eigen::Index ambient = 37;
  Eigen::Index order = 6;
  double within_noise = 0.1;
  Eigen::Index nuisance_dim = 0;
  double class_spread = 0.0;
  std::uint64_t seed = 42;

  void validate() const;
};

/// First n left singular vectors of a D x m feature matrix. Throws
/// RankDeficient when rank < n. A near-tie sigma_n ~ sigma_{n+1} (relative
/// gap below 1e-8) is counted in `health` and the subspace still returned.
GrassmannPoint build_subspace(const Matrix& features, Eigen::Index order,
                              NumericalHealth* health = nullptr);

struct Prediction {
  Label label = 0;
  std::size_t neighbor = 0;  // index into the training set
  double score = 0.0;        // measure to that neighbor
};

/// Nearest neighbor under `kind` (largest similarity for the kernel); ties
/// go to the lowest training index. Throws EmptyTrainingSet.
std::vector<Prediction> nn_predict(const LabeledDataset& train,
                                   const std::vector<GrassmannPoint>& test,
                                   MeasureKind kind);
std::vector<Label> nn_classify(const LabeledDataset& train,
                               const std::vector<GrassmannPoint>& test,
                               MeasureKind kind);

/// Every sample mapped through reduce_point.
LabeledDataset reduce_dataset(const MappingMatrix& w, const LabeledDataset& ds);

/// Fraction of test samples whose NN label matches. With `w`, both sets are
/// reduced to G(n, d) first.
double evaluate(const LabeledDataset& train, const LabeledDataset& test,
                MeasureKind kind,
                const std::optional<MappingMatrix>& w = std::nullopt);

/// Deterministic per seed.
LabeledDataset synth_dataset(const SynthParams& params);

/// Splits each class by within-class order: the first `train_per_class`
/// samples of every class go to the first set, the rest to the second.
std::pair<LabeledDataset, LabeledDataset> split_per_class(
    const LabeledDataset& ds, int train_per_class);

/// Configuration for one training run on a labeled set.
struct TrainConfig {
  MeasureKind kind = MeasureKind::ProjectionSq;
  Eigen::Index target_dim = 1;
  std::optional<int> kw;  // default_kw(labels) when unset
  int kb = 1;
  bool sign_flip_similarity = true;
  OptimOptions optim;
  std::optional<std::uint64_t> init_seed;  // identity start when unset
};

struct TrainResult {
  OptimResult optim;
  AffinityGraph graph;
};

/// Affinity on the original manifold, then minimize.
TrainResult train(const LabeledDataset& ds, const TrainConfig& cfg);

struct GridCell {
  Eigen::Index d = 0;
  int kb = 1;
  double accuracy = 0.0;  // mean held-out accuracy over folds
};

struct GridResult {
  Eigen::Index best_d = 0;
  int best_kb = 1;
  std::vector<GridCell> cells;
};

/// Stratified k-fold search over (d, kb); ties go to the smallest d, then
/// the smallest kb. Throws InvalidGrid for d < n or d >= D, or an empty grid.
GridResult grid_search(const LabeledDataset& train, int folds,
                       const std::vector<Eigen::Index>& dims,
                       const std::vector<int>& kbs, const TrainConfig& base);

/// Fold id per sample: rank within its class modulo `folds`.
std::vector<int> stratified_folds(const std::vector<Label>& labels, int folds);

struct GradientCheckOptions {
  int points = 6;
  double fd_step = 1e-6;
  double tolerance = 1e-5;
  /// Add a sample that is a tiny rotation of sample 0 (exercises guards).
  bool inject_near_identical = false;
  /// Test hook: perturb the analytic gradient so the check must fail.
  bool corrupt_gradient = false;
};

struct GradientCheckReport {
  MeasureKind kind = MeasureKind::ProjectionSq;
  int trials = 0;
  int checked = 0;
  int guarded = 0;   // trials excluded because a guard fired
  int failures = 0;  // checked trials above tolerance
  double max_rel_error = 0.0;
  NumericalHealth health;
};

/// ||a - b||_F / max(||a||_F, ||b||_F, 1e-12).
double relative_error(const Matrix& a, const Matrix& b);

/// Central finite differences of cost() with respect to every entry of a
/// raw D x d matrix.
Matrix finite_difference_grad(const Matrix& w, const Problem& p, double step);

/// Compares euclidean_grad with finite differences on `trials` random
/// problems. Failures are reported, not thrown.
GradientCheckReport gradient_check(MeasureKind kind, Eigen::Index ambient,
                                   Eigen::Index target, Eigen::Index order,
                                   int trials, std::uint64_t seed,
                                   const GradientCheckOptions& opts = {});

}  // namespace ggdr
