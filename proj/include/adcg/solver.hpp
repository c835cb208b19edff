#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adcg/forward_model.hpp"
#include "adcg/loss.hpp"
#include "adcg/measure.hpp"

namespace adcg {

enum class Variant {
  CGM_M,  ///< fully-corrective conditional gradient over measures
  ADCG,   ///< alternating descent: weight solves interleaved with support moves
  GF,     ///< weight solve followed by a single gradient pass on the support
};

enum class Termination { gap_met, max_iters, stagewise_stop };

std::string to_string(Variant v);
std::string to_string(Termination t);
Variant parse_variant(const std::string& name);

struct SolverConfig {
  Variant variant = Variant::ADCG;
  double tau = 1.0;
  int max_outer_iters = 50;
  double gap_tolerance = 1e-6;
  int max_inner_passes = 50;
  int local_descent_steps = 20;
  std::optional<double> stagewise_threshold;
  /// Inner block-coordinate loop stops once the relative decrease drops below this.
  double inner_relative_tolerance = 1e-6;
  /// Weights at or below prune_relative_tolerance * tau are removed.
  double prune_relative_tolerance = 1e-7;

  void validate() const;
};

/// Traces are indexed by iterate: entry i belongs to the measure after i
/// outer updates (entry 0 is the empty measure).  gap_trace[i] is the
/// certificate computed at that measure.
struct SolveResult {
  AtomicMeasure measure;
  std::vector<double> objective_trace;
  std::vector<double> gap_trace;
  std::vector<std::size_t> support_trace;
  double lower_bound = 0.0;
  Termination termination = Termination::max_iters;
  /// Number of linear minimization calls made.
  int iterations = 0;
  /// Set when some weight solve hit its iteration cap.
  bool weight_solver_warning = false;
};

/// Optional instrumentation for run().
struct RunHooks {
  /// Replaces model.lmo(g); receives the outer iteration index k >= 1.
  std::function<ParameterPoint(const Vector& g, int k)> lmo;
  /// Called with (i, mu_i) every time an iterate is recorded.
  std::function<void(int, const AtomicMeasure&)> on_iterate;
};

/// Conditional-gradient certificate <Phi mu, g> - tau * min(0, <psi(theta_new), g>).
double frank_wolfe_gap(const ForwardModel& model, const AtomicMeasure& mu, const Vector& g,
                       const ParameterPoint& theta_new, double tau);

/// loss(sum_i w_i psi(theta_i) - y)
double support_objective(const ForwardModel& model, const std::vector<ParameterPoint>& support,
                         const Vector& weights, const Vector& y, const Loss& loss);

/// Projected (or retracted) gradient descent on the atom parameters with the
/// weights held fixed.  Never increases support_objective.
std::vector<ParameterPoint> local_descent(const ForwardModel& model,
                                          const std::vector<ParameterPoint>& support,
                                          const Vector& weights, const Vector& y, const Loss& loss,
                                          int steps);

SolveResult run(const ForwardModel& model, const Vector& y, const Loss& loss,
                const SolverConfig& config, const RunHooks& hooks = {});

}  // namespace adcg
