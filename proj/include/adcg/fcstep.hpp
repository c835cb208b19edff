#pragma once

#include <functional>
#include <optional>

#include "adcg/loss.hpp"
#include "adcg/types.hpp"

namespace adcg {

/// min_{w >= 0, sum(w) <= tau} loss(A w - y)
struct WeightProblem {
  Matrix A;
  Vector y;
  double tau = 1.0;
  std::reference_wrapper<const Loss> loss;
};

struct WeightSolverOptions {
  int max_iterations = 10000;
  double kkt_tolerance = 1e-8;
  /// Attempt an exact solve on the detected active set every this many
  /// iterations (squared loss only).  Zero disables it.
  int polish_interval = 25;
};

struct WeightSolution {
  Vector w;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Euclidean projection onto {w >= 0, sum(w) <= tau}.
Vector project_capped_simplex(const Vector& w, double tau);

/// ||w - P(w - grad f(w))||_inf, the fixed-point residual of projected gradient.
double kkt_residual(const Vector& w, const Vector& grad, double tau);

double weight_objective(const WeightProblem& prob, const Vector& w);

/// Accelerated projected gradient with backtracking and restarts.  The result
/// is feasible and never worse than the projected warm start.
WeightSolution solve_weights(const WeightProblem& prob, const std::optional<Vector>& w0 = std::nullopt,
                             const WeightSolverOptions& options = {});

}  // namespace adcg
