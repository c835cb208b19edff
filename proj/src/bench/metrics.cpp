#include "adcg/bench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adcg::bench {

std::vector<int> solve_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("solve_assignment: cost matrix must be square");
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials formulation, 1-based with a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of_row(n, -1);
  for (int j = 1; j <= n; ++j) col_of_row[p[j] - 1] = j - 1;
  return col_of_row;
}

MatchScore match_sources(std::span<const Source> est, std::span<const Source> truth, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("match_sources: radius must be positive");
  MatchScore score;
  const auto ne = static_cast<Eigen::Index>(est.size());
  const auto nt = static_cast<Eigen::Index>(truth.size());
  if (ne > 0 && nt > 0) {
    // Unmatched pairs cost more than any set of in-radius matches combined.
    const Eigen::Index n = std::max(ne, nt);
    const double miss = radius * static_cast<double>(n + 1) + 1.0;
    Matrix cost = Matrix::Constant(n, n, miss);
    for (Eigen::Index i = 0; i < ne; ++i) {
      for (Eigen::Index j = 0; j < nt; ++j) {
        const double dist = std::hypot(est[static_cast<std::size_t>(i)].x - truth[static_cast<std::size_t>(j)].x,
                                       est[static_cast<std::size_t>(i)].y - truth[static_cast<std::size_t>(j)].y);
        if (dist <= radius) cost(i, j) = dist;
      }
    }
    const auto assignment = solve_assignment(cost);
    for (Eigen::Index i = 0; i < ne; ++i) {
      const int j = assignment[static_cast<std::size_t>(i)];
      if (j < nt && cost(i, j) <= radius) ++score.matches;
    }
  }
  const auto matches = static_cast<double>(score.matches);
  score.precision = ne > 0 ? matches / static_cast<double>(ne) : 0.0;
  score.recall = nt > 0 ? matches / static_cast<double>(nt) : 0.0;
  const double denom = score.precision + score.recall;
  score.f1 = denom > 0.0 ? 2.0 * score.precision * score.recall / denom : 0.0;
  return score;
}

double sysid_score(const Vector& pred, const Vector& test) {
  if (pred.size() != test.size() || test.size() < 1) {
    throw std::invalid_argument("sysid_score: prediction and test must have equal nonzero length");
  }
  const double spread = (test.array() - test.mean()).matrix().norm();
  if (!(spread > 0.0)) throw std::invalid_argument("sysid_score: test output is constant");
  return 100.0 * (1.0 - (pred - test).norm() / spread);
}

double matcomp_predict(const AtomicMeasure& mu, int rows, int i, int j, double train_mean) {
  double raw = train_mean;
  for (const auto& a : mu.atoms()) raw += a.weight * a.theta[i] * a.theta[rows + j];
  return std::clamp(raw, 1.0, 5.0);
}

double matcomp_rmse(const AtomicMeasure& mu, int rows, std::span<const Rating> test, double train_mean) {
  if (test.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& r : test) {
    const double e = matcomp_predict(mu, rows, r.user, r.item, train_mean) - r.rating;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(test.size()));
}

}  // namespace adcg::bench
