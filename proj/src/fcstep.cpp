#include "adcg/fcstep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/QR>

namespace adcg {

Vector project_capped_simplex(const Vector& w, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("project_capped_simplex: tau must be positive");
  Vector clipped = w.cwiseMax(0.0);
  if (clipped.sum() <= tau) return clipped;

  // Sorted-threshold projection onto {x >= 0, sum x = tau}.
  std::vector<double> u(w.data(), w.data() + w.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - tau) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) threshold = candidate;
  }
  return (w.array() - threshold).cwiseMax(0.0).matrix();
}

double kkt_residual(const Vector& w, const Vector& grad, double tau) {
  if (w.size() == 0) return 0.0;
  return (w - project_capped_simplex(w - grad, tau)).lpNorm<Eigen::Infinity>();
}

double weight_objective(const WeightProblem& prob, const Vector& w) {
  return prob.loss.get().value(prob.A * w - prob.y);
}

namespace {

// Value and gradient of w -> loss(A w - y), evaluated through the residual
// so that neither loses precision near the optimum.
class WeightObjective {
 public:
  explicit WeightObjective(const WeightProblem& prob) : prob_(prob), squared_(prob.loss.get().is_squared()) {}

  bool squared() const { return squared_; }
  const Matrix& A() const { return prob_.A; }
  const Vector& y() const { return prob_.y; }

  double value(const Vector& w) const { return prob_.loss.get().value(prob_.A * w - prob_.y); }

  Vector gradient(const Vector& w) const {
    return prob_.A.transpose() * prob_.loss.get().gradient(prob_.A * w - prob_.y);
  }

 private:
  const WeightProblem& prob_;
  bool squared_;
};

// True if a is no worse than b up to rounding in the objective value.
bool no_worse(double a, double b) { return a <= b + 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(b)); }

// Primal active-set pass: move from x toward the exact minimizer over the
// current support (mass constraint free or tight), dropping the first weight
// that hits zero, until the minimizer is feasible.  Along each segment the
// objective is non-increasing.  Returns nothing if no improvement was found.
std::optional<Vector> polish_active_set(const WeightObjective& obj, const Vector& x0, double tau) {
  Vector x = x0;
  const double start_value = obj.value(x0);
  for (Eigen::Index pass = 0; pass <= x0.size(); ++pass) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] > 0.0) active.push_back(i);
    }
    if (active.empty()) break;
    const auto k = static_cast<Eigen::Index>(active.size());
    Matrix a(obj.A().rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) a.col(i) = obj.A().col(active[i]);
    Vector target = Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(obj.y());
    if (target.sum() > tau) {
      Matrix kkt = Matrix::Zero(k + 1, k + 1);
      kkt.topLeftCorner(k, k) = a.transpose() * a;
      kkt.block(0, k, k, 1).setOnes();
      kkt.block(k, 0, 1, k).setOnes();
      Vector rhs(k + 1);
      rhs.head(k) = a.transpose() * obj.y();
      rhs[k] = tau;
      target = Eigen::CompleteOrthogonalDecomposition<Matrix>(kkt).solve(rhs).head(k);
    }
    if (!target.allFinite()) break;

    double step = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (target[i] < 0.0) {
        const double xi = x[active[i]];
        const double ratio = xi / (xi - target[i]);
        if (ratio < step) {
          step = ratio;
          blocking = i;
        }
      }
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::Index idx = active[i];
      x[idx] = std::max(0.0, x[idx] + step * (target[i] - x[idx]));
    }
    if (blocking < 0) break;
    x[active[blocking]] = 0.0;
  }
  x = project_capped_simplex(x, tau);
  if (!x.allFinite() || !no_worse(obj.value(x), start_value)) return std::nullopt;
  return x;
}

}  // namespace

WeightSolution solve_weights(const WeightProblem& prob, const std::optional<Vector>& w0,
                             const WeightSolverOptions& options) {
  if (!(prob.tau > 0.0)) throw std::invalid_argument("solve_weights: tau must be positive");
  if (prob.A.rows() != prob.y.size()) throw DimensionError("solve_weights: A rows differ from y length");
  const Eigen::Index m = prob.A.cols();
  WeightSolution out;
  if (m == 0) {
    out.w = Vector(0);
    out.objective = weight_objective(prob, out.w);
    out.converged = true;
    return out;
  }
  if (w0 && w0->size() != m) throw DimensionError("solve_weights: warm start length differs from column count");

  const WeightObjective obj(prob);
  auto kkt_ok = [&](const Vector& w, const Vector& g) {
    return kkt_residual(w, g, prob.tau) <= options.kkt_tolerance * (1.0 + g.lpNorm<Eigen::Infinity>());
  };

  Vector x = w0 ? project_capped_simplex(*w0, prob.tau) : Vector::Zero(m);
  double fx = obj.value(x);

  double lipschitz = static_cast<double>(m) * prob.A.colwise().squaredNorm().maxCoeff();
  if (!(lipschitz > 0.0)) lipschitz = 1.0;

  Vector y = x;
  double t = 1.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Vector gx = obj.gradient(x);
    if (kkt_ok(x, gx)) {
      out.converged = true;
      break;
    }
    if (obj.squared() && options.polish_interval > 0 && it % options.polish_interval == 0) {
      if (auto polished = polish_active_set(obj, x, prob.tau)) {
        const double fp = obj.value(*polished);
        if (no_worse(fp, fx)) {
          const bool restart = (*polished - x).norm() > 0.0;
          x = *polished;
          fx = fp;
          if (restart) {
            y = x;
            t = 1.0;
          }
          if (kkt_ok(x, obj.gradient(x))) {
            out.converged = true;
            break;
          }
        }
      }
    }

    const Vector gy = obj.gradient(y);
    const double fy = obj.value(y);
    Vector next;
    double fnext = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      next = project_capped_simplex(y - gy / lipschitz, prob.tau);
      const Vector diff = next - y;
      fnext = obj.value(next);
      if (fnext <= fy + gy.dot(diff) + 0.5 * lipschitz * diff.squaredNorm() + 1e-15 * std::abs(fy)) break;
      lipschitz *= 2.0;
    }

    if (fnext > fx) {
      // Momentum overshot; restart from the last accepted point.
      if (y == x) break;  // no progress possible from x itself
      y = x;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = std::move(next);
    fx = fnext;
    t = t_next;
  }

  if (!out.converged && obj.squared()) {
    if (auto polished = polish_active_set(obj, x, prob.tau)) {
      if (no_worse(obj.value(*polished), fx)) x = *polished;
    }
  }

  const Vector gx = obj.gradient(x);
  out.w = std::move(x);
  out.iterations = it;
  out.kkt_residual = kkt_residual(out.w, gx, prob.tau);
  out.converged = out.converged || kkt_ok(out.w, gx);
  out.objective = weight_objective(prob, out.w);
  return out;
}

}  // namespace adcg
