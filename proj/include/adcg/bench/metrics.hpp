#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "adcg/measure.hpp"
#include "adcg/types.hpp"

namespace adcg::bench {

/// A localized point source; `weight` is the estimated or true intensity.
struct Source {
  double x = 0.0;
  double y = 0.0;
  double weight = 0.0;
};

struct MatchScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matches = 0;
};

struct Rating {
  int user = 0;
  int item = 0;
  double rating = 0.0;
};

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method).  Returns col_of_row.
std::vector<int> solve_assignment(const Matrix& cost);

/// One-to-one matching of estimates to truth using only pairs within
/// `radius`; the number of matches is maximized first, then the total
/// matched distance is minimized.  Empty denominators give 0.
MatchScore match_sources(std::span<const Source> est, std::span<const Source> truth, double radius);

/// 100 (1 - ||pred - test|| / ||mean(test) - test||).  Throws on constant test data.
double sysid_score(const Vector& pred, const Vector& test);

/// Prediction for (i, j): clamp(train_mean + sum_k w_k u_k[i] v_k[j], 1, 5).
double matcomp_predict(const AtomicMeasure& mu, int rows, int i, int j, double train_mean);

/// Root-mean-square error of clamped predictions over the test ratings.
double matcomp_rmse(const AtomicMeasure& mu, int rows, std::span<const Rating> test, double train_mean);

}  // namespace adcg::bench
