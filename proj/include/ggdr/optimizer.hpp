#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ggdr/manifold.hpp"
#include "ggdr/objective.hpp"

namespace ggdr {

/// Coefficient of the transported previous direction in conjugate gradient.
/// SteepestDescent pins it to zero.
enum class BetaRule { PolakRibierePlus, FletcherReeves, SteepestDescent };

struct ArmijoOptions {
  double initial_step = 1.0;
  double sufficient_decrease = 1e-4;
  double contraction = 0.5;
  int max_backtracks = 30;
};

struct OptimOptions {
  int max_iter = 100;
  double rel_cost_tol = 1e-6;
  double grad_norm_tol = 1e-6;
  BetaRule beta_rule = BetaRule::PolakRibierePlus;
  ArmijoOptions line_search;
  /// Iterations between forced steepest-descent restarts; 0 selects
  /// d * (D - d), the dimension of G(d, D).
  int restart_period = 0;

  /// Throws InvalidArgument on non-positive tolerances or a contraction
  /// outside (0, 1).
  void validate() const;
};

/// One row per iteration. Row 0 is the starting point (step 0).
struct TraceRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  int backtracks = 0;
  std::size_t skipped_pairs = 0;
  // Not exported to CSV; kept for contract checks.
  double orthonormality_error = 0.0;  // ||W^T W - I||_F
  double tangency_error = 0.0;        // ||W^T R_W L||_F
  double direction_slope = 0.0;       // <H, grad> of the direction searched
  bool restarted = false;
};

using OptimTrace = std::vector<TraceRecord>;

enum class StopReason {
  GradientTolerance,
  CostTolerance,
  MaxIterations,
  LineSearchFailed,
};

const char* to_string(StopReason reason);

struct OptimResult {
  MappingMatrix w;
  OptimTrace trace;
  StopReason reason = StopReason::MaxIterations;
  NumericalHealth health;

  bool line_search_failed() const {
    return reason == StopReason::LineSearchFailed;
  }
  double final_cost() const { return trace.back().cost; }
  int iterations() const { return trace.back().iter; }
};

/// Riemannian conjugate gradient on G(d, D) with Armijo backtracking along
/// the exact geodesic. Starts from I_{D x d} unless `w0` is given. The
/// previous direction is transported to the new iterate before combining
/// with the new gradient; non-descent directions reset to -grad.
///
/// A failed line search does not throw: the best iterate is returned with
/// reason LineSearchFailed. Objective errors propagate.
OptimResult minimize(const Problem& p, const std::optional<MappingMatrix>& w0,
                     const OptimOptions& opts = {});

/// Seeded random orthonormal D x d start.
MappingMatrix random_initial_map(const Problem& p, std::uint64_t seed);

}  // namespace ggdr
