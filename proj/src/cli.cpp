#include "ggdr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>

#include "ggdr/error.hpp"
#include "ggdr/io.hpp"
#include "ggdr/metrics.hpp"
#include "ggdr/objective.hpp"
#include "ggdr/optimizer.hpp"
#include "ggdr/pipeline.hpp"

namespace ggdr::cli {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

MeasureKind metric_or_throw(const std::string& name) {
  const auto kind = parse_measure_kind(name);
  if (!kind) {
    throw Error(ErrorKind::InvalidArgument,
                "unknown metric '" + name + "' (expected pro, fs, bc, pk, bck)");
  }
  return *kind;
}

BetaRule beta_or_throw(const std::string& name) {
  if (name == "pr" || name == "pr+") return BetaRule::PolakRibierePlus;
  if (name == "fr") return BetaRule::FletcherReeves;
  if (name == "sd") return BetaRule::SteepestDescent;
  throw Error(ErrorKind::InvalidArgument,
              "unknown CG rule '" + name + "' (expected pr, fr, sd)");
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Io: return kIoError;
    case ErrorCategory::Validation: return kValidationError;
    case ErrorCategory::Numerical: return kNumericalError;
  }
  return kNumericalError;
}

struct TrainArgs {
  std::string data;
  std::string metric = "pro";
  int dim = 0;
  int order = 0;  // 0: take it from basis files
  int kw = 0;     // 0: default_kw
  int kb = 1;
  std::string out;
  std::string trace;
  std::string graph;
  std::uint64_t seed = 0;
  std::string init = "identity";
  int max_iter = 100;
  double rel_tol = 1e-6;
  double grad_tol = 1e-6;
  std::string beta = "pr";
  bool literal_similarity = false;
};

struct EvalArgs {
  std::string train;
  std::string test;
  std::string metric = "pro";
  std::string model;
  int order = 0;
  std::string predictions = "predictions.csv";
};

struct SynthArgs {
  int classes = 8;
  int per_class = 10;
  int ambient = 37;
  int order = 6;
  double noise = 0.1;
  int nuisance_dim = 0;
  double class_spread = 0.0;
  std::uint64_t seed = 42;
  std::string out;
  std::string test_out;
  int test_per_class = 0;  // 0: same as per_class
};

struct GradcheckArgs {
  std::string metric = "all";
  int trials = 20;
  std::uint64_t seed = 1;
  int ambient = 12;
  int dim = 6;
  int order = 2;
  bool near_identical = false;
  bool corrupt = false;
};

std::optional<Eigen::Index> order_opt(int order) {
  if (order > 0) return order;
  return std::nullopt;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const MeasureKind kind = metric_or_throw(a.metric);
  OptimOptions optim;
  optim.max_iter = a.max_iter;
  optim.rel_cost_tol = a.rel_tol;
  optim.grad_norm_tol = a.grad_tol;
  optim.beta_rule = beta_or_throw(a.beta);
  optim.validate();
  if (a.dim < 1) throw Error(ErrorKind::InvalidArgument, "--dim must be >= 1");
  if (a.order < 0) throw Error(ErrorKind::InvalidArgument, "--order must be >= 1");
  if (a.order > 0 && a.dim < a.order) {
    throw Error(ErrorKind::InvalidArgument,
                "--dim " + std::to_string(a.dim) + " is smaller than --order " +
                    std::to_string(a.order));
  }
  if (a.kb < 1 || (a.kw > 0 && a.kb > a.kw) || a.kw < 0) {
    throw Error(ErrorKind::InvalidK, "need 1 <= kb <= kw");
  }
  if (a.init != "identity" && a.init != "random") {
    throw Error(ErrorKind::InvalidArgument, "--init must be identity or random");
  }

  const LabeledDataset ds = io::read_dataset(a.data, order_opt(a.order));
  const Eigen::Index amb = ds.samples[0].ambient();
  const Eigen::Index ord = ds.samples[0].order();
  if (a.dim < ord || a.dim > amb) {
    throw Error(ErrorKind::InvalidArgument,
                "--dim " + std::to_string(a.dim) + " must lie in [n=" +
                    std::to_string(ord) + ", D=" + std::to_string(amb) + "]");
  }

  TrainConfig cfg;
  cfg.kind = kind;
  cfg.target_dim = a.dim;
  if (a.kw > 0) cfg.kw = a.kw;
  cfg.kb = a.kb;
  cfg.sign_flip_similarity = !a.literal_similarity;
  cfg.optim = optim;
  if (a.init == "random") cfg.init_seed = a.seed;

  const TrainResult tr = train(ds, cfg);
  const OptimResult& res = tr.optim;

  io::write_matrix_csv(a.out, res.w.w());
  if (!a.trace.empty()) {
    const Params params = {
        {"data", a.data},
        {"metric", std::string(short_name(kind))},
        {"ambient", std::to_string(amb)},
        {"dim", std::to_string(a.dim)},
        {"order", std::to_string(ord)},
        {"samples", std::to_string(ds.size())},
        {"kw", std::to_string(tr.graph.kw)},
        {"kb", std::to_string(tr.graph.kb)},
        {"init", a.init},
        {"seed", std::to_string(a.seed)},
        {"max_iter", std::to_string(optim.max_iter)},
        {"rel_tol", io::format_double(optim.rel_cost_tol)},
        {"grad_tol", io::format_double(optim.grad_norm_tol)},
        {"beta", a.beta},
        {"sign_flip_similarity", a.literal_similarity ? "false" : "true"},
        {"stop", to_string(res.reason)},
    };
    io::write_trace_csv(a.trace, res.trace, params);
  }
  if (!a.graph.empty()) io::write_int_matrix_csv(a.graph, tr.graph.g);

  out << "final_cost=" << io::format_double(res.final_cost())
      << " iterations=" << res.iterations() << " stop=" << to_string(res.reason)
      << '\n';
  if (res.health.total() > 0) {
    out << "numerical_health clamped_determinants="
        << res.health.clamped_determinants
        << " skipped_pairs=" << res.health.skipped_pairs << '\n';
  }
  return res.line_search_failed() ? kNumericalError : kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const MeasureKind kind = metric_or_throw(a.metric);
  if (a.order < 0) throw Error(ErrorKind::InvalidArgument, "--order must be >= 1");
  const LabeledDataset train_set = io::read_dataset(a.train, order_opt(a.order));
  const LabeledDataset test_set =
      a.test.empty() ? train_set : io::read_dataset(a.test, order_opt(a.order));

  std::optional<MappingMatrix> w;
  if (!a.model.empty()) {
    const Matrix m = io::read_matrix_csv(a.model);
    if (m.rows() != train_set.samples[0].ambient()) {
      throw Error(ErrorKind::DimensionMismatch,
                  a.model + ": model has " + std::to_string(m.rows()) +
                      " rows, dataset ambient dimension is " +
                      std::to_string(train_set.samples[0].ambient()));
    }
    w = MappingMatrix(m, train_set.samples[0].order(), kind);
  }
  const LabeledDataset tr = w ? reduce_dataset(*w, train_set) : train_set;
  const LabeledDataset te = w ? reduce_dataset(*w, test_set) : test_set;
  const auto preds = nn_predict(tr, te.samples, kind);

  std::vector<io::PredictionRow> rows;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    rows.push_back({te.provenance[i], te.labels[i], preds[i].label,
                    preds[i].score});
    if (preds[i].label == te.labels[i]) ++correct;
  }
  const double acc =
      static_cast<double>(correct) / static_cast<double>(preds.size());
  if (!a.predictions.empty()) io::write_predictions_csv(a.predictions, rows);
  out << "accuracy=" << io::format_double(acc) << '\n';
  return kOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const int test_per_class =
      a.test_out.empty() ? 0 : (a.test_per_class > 0 ? a.test_per_class : a.per_class);
  if (a.test_per_class < 0) {
    throw Error(ErrorKind::InvalidArgument, "--test-per-class must be >= 0");
  }
  SynthParams params;
  params.classes = a.classes;
  params.samples_per_class = a.per_class + test_per_class;
  params.ambient = a.ambient;
  params.order = a.order;
  params.within_noise = a.noise;
  params.nuisance_dim = a.nuisance_dim;
  params.class_spread = a.class_spread;
  params.seed = a.seed;
  const LabeledDataset all = synth_dataset(params);
  const auto [first, second] = split_per_class(all, a.per_class);
  io::write_dataset(a.out, first);
  if (!a.test_out.empty()) io::write_dataset(a.test_out, second);
  out << "wrote " << first.size() << " samples to " << a.out;
  if (!a.test_out.empty()) out << " and " << second.size() << " to " << a.test_out;
  out << '\n';
  return kOk;
}

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  std::vector<MeasureKind> kinds;
  if (a.metric == "all") {
    kinds.assign(kAllMeasureKinds.begin(), kAllMeasureKinds.end());
  } else {
    kinds.push_back(metric_or_throw(a.metric));
  }
  if (a.trials < 1) throw Error(ErrorKind::InvalidArgument, "--trials must be >= 1");
  GradientCheckOptions opts;
  opts.inject_near_identical = a.near_identical;
  opts.corrupt_gradient = a.corrupt;
  bool failed = false;
  for (MeasureKind kind : kinds) {
    const auto r =
        gradient_check(kind, a.ambient, a.dim, a.order, a.trials, a.seed, opts);
    out << "metric=" << short_name(kind) << " trials=" << r.trials
        << " checked=" << r.checked << " guarded=" << r.guarded
        << " failures=" << r.failures
        << " max_rel_error=" << io::format_double(r.max_rel_error)
        << " clamped_determinants=" << r.health.clamped_determinants
        << " skipped_pairs=" << r.health.skipped_pairs << '\n';
    failed = failed || r.failures > 0;
  }
  return failed ? kNumericalError : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Discriminative dimensionality reduction on Grassmann manifolds",
               "ggdr"};
  app.set_config("--config", "", "Read key=value options from a file");
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Learn a mapping W from a dataset");
  train_cmd->add_option("--data", ta.data, "Dataset directory")->required();
  train_cmd->add_option("--metric", ta.metric, "pro | fs | bc | pk | bck");
  train_cmd->add_option("--dim", ta.dim, "Target dimension d")->required();
  train_cmd->add_option("--order", ta.order, "Subspace order n (raw samples)");
  train_cmd->add_option("--kw", ta.kw, "Within-class neighbors (default: min class size - 1)");
  train_cmd->add_option("--kb", ta.kb, "Between-class neighbors");
  train_cmd->add_option("--out", ta.out, "Output CSV for W")->required();
  train_cmd->add_option("--trace", ta.trace, "Output CSV for the optimizer trace");
  train_cmd->add_option("--graph", ta.graph, "Output CSV for the affinity graph");
  train_cmd->add_option("--seed", ta.seed, "Seed for --init random");
  train_cmd->add_option("--init", ta.init, "identity | random");
  train_cmd->add_option("--max-iter", ta.max_iter, "Iteration limit");
  train_cmd->add_option("--rel-tol", ta.rel_tol, "Relative cost change tolerance");
  train_cmd->add_option("--grad-tol", ta.grad_tol, "Riemannian gradient norm tolerance");
  train_cmd->add_option("--beta", ta.beta, "CG rule: pr | fr | sd");
  train_cmd->add_flag("--literal-similarity", ta.literal_similarity,
                      "Minimize the kernel as written (no sign flip)");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Nearest-neighbor evaluation");
  eval_cmd->add_option("--train", ea.train, "Training dataset directory")->required();
  eval_cmd->add_option("--test", ea.test, "Test dataset directory (default: --train)");
  eval_cmd->add_option("--metric", ea.metric, "pro | fs | bc | pk | bck");
  eval_cmd->add_option("--model", ea.model, "W CSV; omit to classify on the original manifold");
  eval_cmd->add_option("--order", ea.order, "Subspace order n (raw samples)");
  eval_cmd->add_option("--predictions", ea.predictions, "Output CSV of per-sample predictions");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset");
  synth_cmd->add_option("--classes", sa.classes);
  synth_cmd->add_option("--per-class", sa.per_class);
  synth_cmd->add_option("--ambient", sa.ambient, "D");
  synth_cmd->add_option("--order", sa.order, "n");
  synth_cmd->add_option("--noise", sa.noise, "Within-class tangent noise scale");
  synth_cmd->add_option("--nuisance-dim", sa.nuisance_dim,
                        "Shared within-class noise subspace dimension (0: isotropic)");
  synth_cmd->add_option("--class-spread", sa.class_spread,
                        "Spread of class centers around a common subspace (0: independent)");
  synth_cmd->add_option("--seed", sa.seed);
  synth_cmd->add_option("--out", sa.out, "Dataset directory")->required();
  synth_cmd->add_option("--test-out", sa.test_out, "Optional held-out dataset directory");
  synth_cmd->add_option("--test-per-class", sa.test_per_class,
                        "Held-out samples per class (default: --per-class)");

  GradcheckArgs ga;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  grad_cmd->add_option("--metric", ga.metric, "pro | fs | bc | pk | bck | all");
  grad_cmd->add_option("--trials", ga.trials);
  grad_cmd->add_option("--seed", ga.seed);
  grad_cmd->add_option("--ambient", ga.ambient, "D");
  grad_cmd->add_option("--dim", ga.dim, "d");
  grad_cmd->add_option("--order", ga.order, "n");
  grad_cmd->add_flag("--near-identical", ga.near_identical,
                     "Inject a near-identical within-class pair");
  grad_cmd->add_flag("--corrupt-gradient", ga.corrupt)->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*train_cmd) return cmd_train(ta, out);
    if (*eval_cmd) return cmd_eval(ea, out);
    if (*synth_cmd) return cmd_synth(sa, out);
    if (*grad_cmd) return cmd_gradcheck(ga, out);
  } catch (const Error& e) {
    err << "ggdr: " << e.what();
    if (e.sample()) err << " [sample " << *e.sample() << "]";
    err << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "ggdr: " << e.what() << '\n';
    return kNumericalError;
  }
  return kValidationError;
}

}  // namespace ggdr::cli
