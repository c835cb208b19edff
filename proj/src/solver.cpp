#include "adcg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "adcg/fcstep.hpp"

namespace adcg {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::CGM_M: return "CGM_M";
    case Variant::ADCG: return "ADCG";
    case Variant::GF: return "GF";
  }
  return "?";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::gap_met: return "gap_met";
    case Termination::max_iters: return "max_iters";
    case Termination::stagewise_stop: return "stagewise_stop";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "CGM_M" || name == "CGM-M" || name == "cgm_m" || name == "cgm-m") return Variant::CGM_M;
  if (name == "ADCG" || name == "adcg") return Variant::ADCG;
  if (name == "GF" || name == "gf") return Variant::GF;
  throw std::invalid_argument(fmt::format("unknown solver variant '{}'", name));
}

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("solver: tau must be positive");
  if (max_outer_iters < 1) throw std::invalid_argument("solver: max_outer_iters must be >= 1");
  if (max_inner_passes < 1) throw std::invalid_argument("solver: max_inner_passes must be >= 1");
  if (local_descent_steps < 1) throw std::invalid_argument("solver: local_descent_steps must be >= 1");
  if (!(gap_tolerance >= 0.0)) throw std::invalid_argument("solver: gap_tolerance must be nonnegative");
  if (stagewise_threshold && !(*stagewise_threshold >= 0.0)) {
    throw std::invalid_argument("solver: stagewise_threshold must be nonnegative");
  }
}

double frank_wolfe_gap(const ForwardModel& model, const AtomicMeasure& mu, const Vector& g,
                       const ParameterPoint& theta_new, double tau) {
  const double current = apply_forward(model, mu).dot(g);
  const double atom = model.psi(theta_new).dot(g);
  return current - tau * std::min(0.0, atom);
}

double support_objective(const ForwardModel& model, const std::vector<ParameterPoint>& support,
                         const Vector& weights, const Vector& y, const Loss& loss) {
  Vector r = -y;
  for (std::size_t i = 0; i < support.size(); ++i) {
    r.noalias() += weights[static_cast<Eigen::Index>(i)] * model.psi(support[i]);
  }
  return loss.value(r);
}

namespace {

// Largest eigenvalue of J^T J for the stacked, weight-scaled atom Jacobians.
// Largest eigenvalue of the Gauss-Newton matrix of the weighted stacked
// Jacobian, by power iteration.
double gauss_newton_norm(const ForwardModel& model, const std::vector<ParameterPoint>& support,
                         const Vector& weights) {
  const auto p = static_cast<Eigen::Index>(model.param_dim());
  const auto m = static_cast<Eigen::Index>(support.size());
  if (m == 0 || p == 0) return 0.0;
  Vector x = Vector::Ones(m * p).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 20; ++it) {
    Vector jx = Vector::Zero(static_cast<Eigen::Index>(model.output_dim()));
    for (Eigen::Index i = 0; i < m; ++i) {
      jx.noalias() += weights[i] * model.jacobian_apply(support[static_cast<std::size_t>(i)], x.segment(i * p, p));
    }
    lambda = jx.squaredNorm();
    Vector next(m * p);
    for (Eigen::Index i = 0; i < m; ++i) {
      next.segment(i * p, p) = weights[i] * model.jacobian_transpose_apply(support[static_cast<std::size_t>(i)], jx);
    }
    const double n = next.norm();
    if (n == 0.0) return 0.0;
    x = next / n;
  }
  return lambda;
}

}  // namespace

std::vector<ParameterPoint> local_descent(const ForwardModel& model,
                                          const std::vector<ParameterPoint>& support,
                                          const Vector& weights, const Vector& y, const Loss& loss,
                                          int steps) {
  if (steps <= 0 || support.empty()) return support;
  if (static_cast<std::size_t>(weights.size()) != support.size()) {
    throw DimensionError("local_descent: weight vector length differs from support size");
  }
  const std::size_t m = support.size();
  std::vector<ParameterPoint> current = support;
  double value = support_objective(model, current, weights, y, loss);
  double step = -1.0;

  for (int s = 0; s < steps; ++s) {
    Vector r = -y;
    for (std::size_t i = 0; i < m; ++i) r.noalias() += weights[static_cast<Eigen::Index>(i)] * model.psi(current[i]);
    const Vector gl = loss.gradient(r);

    std::vector<Vector> grads(m);
    double gnorm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      grads[i] = model.tangent(current[i], weights[static_cast<Eigen::Index>(i)] * model.jacobian_transpose_apply(current[i], gl));
      gnorm = std::max(gnorm, grads[i].lpNorm<Eigen::Infinity>());
    }
    if (gnorm == 0.0) break;
    if (step < 0.0) {
      const double lambda = gauss_newton_norm(model, current, weights);
      if (!(lambda > 0.0)) break;
      step = 1.0 / lambda;
    }

    bool accepted = false;
    bool stalled = false;
    for (int ls = 0; ls < 40; ++ls) {
      std::vector<ParameterPoint> cand(m);
      double decrease = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        cand[i] = model.retract(current[i] - step * grads[i]);
        decrease += grads[i].dot(current[i] - cand[i]);
      }
      if (!(decrease > 0.0)) {
        stalled = true;
        break;
      }
      const double cand_value = support_objective(model, cand, weights, y, loss);
      if (cand_value <= value - 1e-4 * decrease) {
        current = std::move(cand);
        value = cand_value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || stalled) break;
    step *= 2.0;
  }
  return current;
}

namespace {

class Stepper {
 public:
  Stepper(const ForwardModel& model, const Vector& y, const Loss& loss, const SolverConfig& config)
      : model_(model), y_(y), loss_(loss), config_(config),
        prune_tol_(config.prune_relative_tolerance * config.tau),
        descent_steps_(config.local_descent_steps) {}

  double objective(const AtomicMeasure& mu) const { return loss_.value(residual(model_, mu, y_)); }

  bool warning() const { return warning_; }

  // Fully-corrective weight solve on the current support followed by pruning.
  // Never returns a measure worse than its input.
  AtomicMeasure reweight(const AtomicMeasure& input) {
    AtomicMeasure mu = merge_duplicates(model_, input);
    if (mu.empty()) return mu;
    const double f_in = objective(input);
    AtomicMeasure solved = solve(mu);
    double f_solved = objective(solved);
    if (f_solved > f_in) {
      solved = prune_zero_weights(input, 0.0);
      f_solved = objective(solved);
    }
    AtomicMeasure pruned = prune_zero_weights(solved, prune_tol_);
    if (pruned.size() == solved.size() || pruned.empty()) {
      if (pruned.empty() && objective(pruned) > f_solved) return prune_zero_weights(solved, 0.0);
      return pruned;
    }
    if (objective(pruned) <= f_solved) return pruned;
    AtomicMeasure resolved = solve(pruned);
    if (objective(resolved) <= f_solved) return prune_zero_weights(resolved, 0.0);
    return prune_zero_weights(solved, 0.0);
  }

  AtomicMeasure move(const AtomicMeasure& mu, int steps) const {
    if (mu.empty()) return mu;
    const auto support = local_descent(model_, mu.support(), mu.weights(), y_, loss_, steps);
    return make_measure(support, mu.weights());
  }

  AtomicMeasure update(const AtomicMeasure& candidate, double f_start) {
    switch (config_.variant) {
      case Variant::CGM_M:
        return reweight(candidate);
      case Variant::GF:
        return move(reweight(candidate), 1);
      case Variant::ADCG: {
        AtomicMeasure cur = candidate;
        double f_cur = f_start;
        for (int pass = 0; pass < config_.max_inner_passes; ++pass) {
          cur = move(reweight(cur), descent_steps_);
          const double f_new = objective(cur);
          const bool done = (f_cur - f_new) <= config_.inner_relative_tolerance * std::abs(f_cur);
          f_cur = f_new;
          if (done) break;
        }
        return cur;
      }
    }
    return candidate;
  }

 private:
  AtomicMeasure solve(const AtomicMeasure& mu) {
    WeightProblem prob{measurement_matrix(model_, mu.support()), y_, config_.tau, std::cref(loss_)};
    const WeightSolution sol = solve_weights(prob, mu.weights());
    if (!sol.converged) warning_ = true;
    return mu.with_weights(sol.w);
  }

  const ForwardModel& model_;
  const Vector& y_;
  const Loss& loss_;
  const SolverConfig& config_;
  double prune_tol_;
  int descent_steps_;
  bool warning_ = false;
};

}  // namespace

SolveResult run(const ForwardModel& model, const Vector& y, const Loss& loss, const SolverConfig& config,
                const RunHooks& hooks) {
  config.validate();
  if (static_cast<std::size_t>(y.size()) != model.output_dim()) {
    throw DimensionError(fmt::format("observation has length {}, model output is {}", y.size(), model.output_dim()));
  }
  const auto d = model.output_dim();
  const bool exact_lmo = model.lmo_is_exact() && !hooks.lmo;
  Stepper stepper(model, y, loss, config);

  SolveResult result;
  AtomicMeasure mu;
  double f = stepper.objective(mu);
  double lower = -std::numeric_limits<double>::infinity();

  for (int k = 1;; ++k) {
    const Vector phi = apply_forward(model, mu);
    const Vector g = loss.gradient(phi - y);
    const ParameterPoint theta = hooks.lmo ? hooks.lmo(g, k) : model.lmo(g);
    model.check_point(theta);
    const double atom_score = model.psi(theta).dot(g);
    const double gap = phi.dot(g) - config.tau * std::min(0.0, atom_score);

    result.objective_trace.push_back(f);
    result.gap_trace.push_back(gap);
    result.support_trace.push_back(mu.size());
    if (hooks.on_iterate) hooks.on_iterate(k - 1, mu);
    lower = std::max(lower, f - std::max(gap, 0.0));
    result.iterations = k;

    if (gap < config.gap_tolerance && (gap >= 0.0 || exact_lmo)) {
      result.termination = Termination::gap_met;
      break;
    }
    if (k > config.max_outer_iters) {
      result.termination = Termination::max_iters;
      break;
    }

    AtomicMeasure candidate = mu;
    const bool duplicate = std::any_of(mu.atoms().begin(), mu.atoms().end(), [&](const Atom& a) {
      return model.normalized_distance(a.theta, theta) < 1e-12;
    });
    if (atom_score < 0.0 && !duplicate) candidate = combine(mu, AtomicMeasure({Atom{0.0, theta}}));

    AtomicMeasure next = stepper.update(candidate, f);
    if (next.size() > d + 1) {
      try {
        next = caratheodory_prune(model, next);
      } catch (const NumericalError&) {
        // Leave the support as is; the next weight solve may still sparsify it.
      }
    }
    const double f_next = stepper.objective(next);

    if (config.stagewise_threshold && f - f_next < *config.stagewise_threshold) {
      result.termination = Termination::stagewise_stop;
      break;
    }
    mu = std::move(next);
    f = f_next;
  }

  result.measure = mu;
  result.lower_bound = lower;
  result.weight_solver_warning = stepper.warning();
  return result;
}

}  // namespace adcg
