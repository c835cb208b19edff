#include "adcg/models/toy.hpp"

#include <cmath>
#include <stdexcept>

namespace adcg::models {

MomentCurveModel::MomentCurveModel(int degree, double lo, double hi) : degree_(degree), box_{{lo, hi}} {
  if (degree < 1 || degree > 3) throw std::invalid_argument("MomentCurveModel: degree must be 1, 2 or 3");
  if (!(lo < hi)) throw std::invalid_argument("MomentCurveModel: empty interval");
}

Vector MomentCurveModel::psi(const ParameterPoint& theta) const {
  check_point(theta);
  Vector out(degree_);
  double p = 1.0;
  for (int k = 0; k < degree_; ++k) {
    p *= theta[0];
    out[k] = p;
  }
  return out;
}

Matrix MomentCurveModel::jacobian(const ParameterPoint& theta) const {
  check_point(theta);
  Matrix j(degree_, 1);
  double p = 1.0;
  for (int k = 0; k < degree_; ++k) {
    j(k, 0) = (k + 1) * p;
    p *= theta[0];
  }
  return j;
}

ParameterPoint MomentCurveModel::lmo(const Vector& v) const {
  if (v.size() != degree_) throw DimensionError("MomentCurveModel::lmo: wrong vector length");
  const double lo = box_[0].lo;
  const double hi = box_[0].hi;
  std::vector<double> candidates{lo, hi};

  // Stationary points of sum_k v_k t^k solve v1 + 2 v2 t + 3 v3 t^2 = 0.
  const double c0 = v[0];
  const double c1 = degree_ >= 2 ? 2.0 * v[1] : 0.0;
  const double c2 = degree_ >= 3 ? 3.0 * v[2] : 0.0;
  if (c2 != 0.0) {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      candidates.push_back((-c1 - sq) / (2.0 * c2));
      candidates.push_back((-c1 + sq) / (2.0 * c2));
    }
  } else if (c1 != 0.0) {
    candidates.push_back(-c0 / c1);
  }

  ParameterPoint best(1);
  best[0] = lo;
  double best_value = psi(best).dot(v);
  for (double t : candidates) {
    if (!(t >= lo && t <= hi)) continue;
    ParameterPoint p(1);
    p[0] = t;
    const double value = psi(p).dot(v);
    if (value < best_value) {
      best_value = value;
      best = p;
    }
  }
  return best;
}

}  // namespace adcg::models
