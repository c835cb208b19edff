// Independent reference computations used by the unit, property and
// acceptance tests.  Everything here is brute force on purpose.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "adcg/forward_model.hpp"
#include "adcg/measure.hpp"
#include "adcg/types.hpp"

namespace oracle {

using adcg::Matrix;
using adcg::Vector;

/// Central finite-difference Jacobian of f at x with a per-coordinate step.
inline Matrix finite_difference_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                                         double rel_step = 1e-6) {
  const Vector f0 = f(x);
  Matrix j(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(x[k]));
    Vector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

/// ||a - b||_F / max(||b||_F, floor)
inline double relative_error(const Matrix& a, const Matrix& b, double floor = 1e-12) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

/// Projection onto {w >= 0, sum w <= tau} by enumerating supports: on a
/// support S the projection is either x_S (mass slack) or x_S - lambda
/// (mass tight).  Returns the nearest feasible candidate.
inline Vector project_capped_simplex(const Vector& x, double tau) {
  const auto n = x.size();
  Vector best = Vector::Zero(n);
  double best_dist = (x - best).squaredNorm();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int count = 0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        ++count;
        sum += x[i];
      }
    }
    for (int tight = 0; tight < 2; ++tight) {
      const double shift = tight ? (sum - tau) / count : 0.0;
      Vector w = Vector::Zero(n);
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (mask & (1u << i)) {
          w[i] = x[i] - shift;
          if (w[i] < -1e-15) ok = false;
        }
      }
      if (!ok || w.sum() > tau * (1 + 1e-12) + 1e-15) continue;
      const double dist = (x - w).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = w.cwiseMax(0.0);
      }
    }
  }
  return best;
}

/// Optimal value of min_{w >= 0, sum w <= tau} 0.5 ||A w - y||^2 by
/// enumerating active sets.  On each support the candidate is the
/// unconstrained least-squares fit, or the fit with the mass constraint
/// tight; every optimum is one of these for some support.
struct WeightOracleResult {
  double value = 0.0;
  Vector w;
};

inline WeightOracleResult enumerate_weight_problem(const Matrix& a, const Vector& y, double tau) {
  const auto m = a.cols();
  WeightOracleResult best{0.5 * y.squaredNorm(), Vector::Zero(m)};
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(s.size());
    Matrix as(a.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) as.col(i) = a.col(s[static_cast<std::size_t>(i)]);
    const Matrix g = as.transpose() * as;
    const Vector b = as.transpose() * y;
    std::vector<Vector> candidates;
    const Eigen::FullPivLU<Matrix> lu(g);
    if (lu.isInvertible()) candidates.push_back(lu.solve(b));
    Matrix kkt = Matrix::Zero(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = g;
    kkt.block(0, k, k, 1).setOnes();
    kkt.block(k, 0, 1, k).setOnes();
    Vector rhs(k + 1);
    rhs << b, tau;
    const Eigen::FullPivLU<Matrix> lu2(kkt);
    if (lu2.isInvertible()) candidates.push_back(lu2.solve(rhs).head(k));
    for (const Vector& ws : candidates) {
      if (ws.minCoeff() < -1e-12 || ws.sum() > tau * (1 + 1e-12)) continue;
      Vector w = Vector::Zero(m);
      for (Eigen::Index i = 0; i < k; ++i) w[s[static_cast<std::size_t>(i)]] = std::max(0.0, ws[i]);
      const double v = 0.5 * (a * w - y).squaredNorm();
      if (v < best.value) best = {v, w};
    }
  }
  return best;
}

/// All basic feasible solutions of [psi_i; 1] w = [target; mass], w >= 0,
/// using exactly `rows` atoms (rows = d + 1).
inline std::vector<Vector> basic_feasible_solutions(const Matrix& stacked, const Vector& rhs) {
  const auto rows = stacked.rows();
  const auto m = stacked.cols();
  std::vector<Vector> out;
  std::vector<int> pick(static_cast<std::size_t>(rows));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == rows) {
      Matrix b(rows, rows);
      for (Eigen::Index i = 0; i < rows; ++i) b.col(i) = stacked.col(pick[static_cast<std::size_t>(i)]);
      const Eigen::FullPivLU<Matrix> lu(b);
      if (!lu.isInvertible()) return;
      const Vector wb = lu.solve(rhs);
      if (wb.minCoeff() < -1e-10) return;
      Vector w = Vector::Zero(m);
      for (Eigen::Index i = 0; i < rows; ++i) w[pick[static_cast<std::size_t>(i)]] = wb[i];
      out.push_back(w);
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return out;
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Sampled squared diameter of tau * ({psi(theta)} U {0}), an upper-bound
/// proxy for the curvature constant of the squared loss on tau conv A.
inline double sampled_curvature(const std::vector<Vector>& atoms, double tau) {
  std::vector<Vector> pts = atoms;
  pts.push_back(Vector::Zero(atoms.front().size()));
  double diam2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) diam2 = std::max(diam2, (tau * (pts[i] - pts[j])).squaredNorm());
  }
  return diam2;
}

/// Uniform point strictly inside the box, margin as a fraction of each width.
inline adcg::ParameterPoint random_interior(const adcg::ForwardModel& model, std::mt19937_64& rng, double margin = 0.05) {
  const auto& box = model.box();
  adcg::ParameterPoint t(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) {
    std::uniform_real_distribution<double> u(box[i].lo + margin * box[i].width(), box[i].hi - margin * box[i].width());
    t[static_cast<Eigen::Index>(i)] = u(rng);
  }
  return t;
}

inline Vector random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v.normalized();
}

}  // namespace oracle
