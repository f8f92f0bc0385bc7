#include "ggdr/optimizer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ggdr/error.hpp"

namespace ggdr {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradientTolerance: return "gradient-tolerance";
    case StopReason::CostTolerance: return "cost-tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::LineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

void OptimOptions::validate() const {
  if (max_iter < 0) throw Error(ErrorKind::InvalidArgument, "max_iter < 0");
  if (!(rel_cost_tol > 0.0) || !(grad_norm_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
  const auto& ls = line_search;
  if (!(ls.initial_step > 0.0) || !(ls.sufficient_decrease > 0.0) ||
      !(ls.sufficient_decrease < 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "line search needs initial_step > 0 and sufficient_decrease "
                "in (0, 1)");
  }
  if (!(ls.contraction > 0.0 && ls.contraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "contraction must lie in (0, 1)");
  }
  if (ls.max_backtracks < 0 || restart_period < 0) {
    throw Error(ErrorKind::InvalidArgument,
                "max_backtracks and restart_period must be nonnegative");
  }
}

MappingMatrix random_initial_map(const Problem& p, std::uint64_t seed) {
  p.validate();
  std::mt19937_64 rng(seed);
  return MappingMatrix(
      orthonormalize(gaussian_matrix(p.ambient(), p.target_dim, rng)).q,
      p.order(), p.kind);
}

namespace {

struct Evaluation {
  double cost = 0.0;
  TangentVector grad;
  std::size_t skipped = 0;
};

Evaluation evaluate(const MappingMatrix& w, const Problem& p,
                    NumericalHealth& health) {
  NumericalHealth local;
  const double f = cost(w, p);
  const Matrix eg = euclidean_grad(w, p, &local);
  health += local;
  return {f, riemannian_grad(w, eg), local.skipped_pairs};
}

// Cost at a trial point; numerical breakdowns reject the trial.
double trial_cost(const MappingMatrix& w, const Problem& p) {
  try {
    return cost(w, p);
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::Numerical) throw;
    return std::numeric_limits<double>::infinity();
  }
}

TraceRecord record(int iter, const MappingMatrix& w, const Evaluation& e) {
  TraceRecord r;
  r.iter = iter;
  r.cost = e.cost;
  r.grad_norm = e.grad.norm();
  r.skipped_pairs = e.skipped;
  r.orthonormality_error = orthonormality_error(w.w());
  r.tangency_error = (w.w().transpose() * e.grad.h()).norm();
  return r;
}

}  // namespace

OptimResult minimize(const Problem& p, const std::optional<MappingMatrix>& w0,
                     const OptimOptions& opts) {
  opts.validate();
  p.validate();
  const Eigen::Index big_d = p.ambient();
  const Eigen::Index small_d = p.target_dim;
  const int restart_period =
      opts.restart_period > 0
          ? opts.restart_period
          : static_cast<int>(std::max<Eigen::Index>(1, small_d * (big_d - small_d)));

  MappingMatrix w = w0 ? *w0
                       : MappingMatrix::truncated_identity(big_d, small_d,
                                                           p.order(), p.kind);
  if (w.ambient() != big_d || w.target() != small_d) {
    throw Error(ErrorKind::DimensionMismatch,
                "initial W does not match the problem shape");
  }

  OptimResult result{w, {}, StopReason::MaxIterations, {}};
  Evaluation cur = evaluate(w, p, result.health);
  result.trace.push_back(record(0, w, cur));
  if (cur.grad.norm() < opts.grad_norm_tol) {
    result.reason = StopReason::GradientTolerance;
    return result;
  }

  const auto& ls = opts.line_search;
  TangentVector dir(-cur.grad.h(), w);
  int since_restart = 0;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    bool restarted = false;
    double slope = inner(dir, cur.grad);
    if (!(slope < 0.0)) {
      dir = TangentVector(-cur.grad.h(), w);
      slope = -cur.grad.norm() * cur.grad.norm();
      restarted = true;
      since_restart = 0;
    }

    const Geodesic geo(w, dir);
    double step = ls.initial_step;
    int backtracks = 0;
    std::optional<MappingMatrix> accepted;
    double accepted_cost = 0.0;
    for (;;) {
      MappingMatrix trial = geo.point(step);
      const double f = trial_cost(trial, p);
      if (f <= cur.cost + ls.sufficient_decrease * step * slope) {
        accepted = std::move(trial);
        accepted_cost = f;
        break;
      }
      if (backtracks == ls.max_backtracks) break;
      step *= ls.contraction;
      ++backtracks;
    }
    if (!accepted) {
      result.reason = StopReason::LineSearchFailed;
      break;
    }

    Evaluation next = evaluate(*accepted, p, result.health);
    next.cost = accepted_cost;
    const TangentVector moved_dir = geo.transport(dir, step);
    double beta = 0.0;
    const double prev_sq = inner(cur.grad, cur.grad);
    switch (opts.beta_rule) {
      case BetaRule::PolakRibierePlus: {
        const TangentVector moved_grad = geo.transport(cur.grad, step);
        const Matrix diff = next.grad.h() - moved_grad.h();
        beta = std::max(0.0, (next.grad.h().array() * diff.array()).sum() /
                                 prev_sq);
        break;
      }
      case BetaRule::FletcherReeves:
        beta = inner(next.grad, next.grad) / prev_sq;
        break;
      case BetaRule::SteepestDescent:
        beta = 0.0;
        break;
    }
    if (++since_restart >= restart_period) {
      beta = 0.0;
      since_restart = 0;
    }

    TraceRecord rec = record(iter, *accepted, next);
    rec.step = step;
    rec.backtracks = backtracks;
    rec.direction_slope = slope;
    rec.restarted = restarted;
    result.trace.push_back(rec);

    const double rel_change =
        std::abs(cur.cost - next.cost) /
        std::max({std::abs(cur.cost), std::abs(next.cost),
                  std::numeric_limits<double>::min()});
    dir = TangentVector(-next.grad.h() + beta * moved_dir.h(), *accepted);
    w = *accepted;
    cur = std::move(next);
    result.w = w;

    if (cur.grad.norm() < opts.grad_norm_tol) {
      result.reason = StopReason::GradientTolerance;
      break;
    }
    if (rel_change < opts.rel_cost_tol) {
      result.reason = StopReason::CostTolerance;
      break;
    }
  }
  return result;
}

}  // namespace ggdr
