#include "adcg/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace adcg {

Vector ForwardModel::jacobian_apply(const ParameterPoint& theta, const Vector& dtheta) const {
  return jacobian(theta) * dtheta;
}

Vector ForwardModel::jacobian_transpose_apply(const ParameterPoint& theta, const Vector& v) const {
  return jacobian(theta).transpose() * v;
}

ParameterPoint ForwardModel::retract(const ParameterPoint& theta) const {
  const auto& b = box();
  ParameterPoint out = theta;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = std::clamp(out[i], b[i].lo, b[i].hi);
  }
  return out;
}

Vector ForwardModel::tangent(const ParameterPoint& /*theta*/, const Vector& grad) const {
  return grad;
}

bool ForwardModel::contains(const ParameterPoint& theta, double slack) const {
  const auto& b = box();
  if (static_cast<std::size_t>(theta.size()) != b.size()) return false;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i]) || theta[i] < b[i].lo - slack || theta[i] > b[i].hi + slack) {
      return false;
    }
  }
  return true;
}

double ForwardModel::normalized_distance(const ParameterPoint& a, const ParameterPoint& b) const {
  const auto& bx = box();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double w = bx[i].width() > 0.0 ? bx[i].width() : 1.0;
    const double d = (a[i] - b[i]) / w;
    acc += d * d;
  }
  return std::sqrt(acc);
}

void ForwardModel::check_point(const ParameterPoint& theta) const {
  if (static_cast<std::size_t>(theta.size()) != param_dim()) {
    throw DimensionError(fmt::format("parameter point has length {}, model expects {}",
                                     theta.size(), param_dim()));
  }
}

ParameterPoint polish_linear_objective(const ForwardModel& model, const Vector& v,
                                       ParameterPoint theta, int max_steps) {
  if (v.squaredNorm() == 0.0) return theta;
  const auto& box = model.box();
  double min_width = std::numeric_limits<double>::infinity();
  for (const auto& iv : box) {
    if (iv.width() > 0.0) min_width = std::min(min_width, iv.width());
  }
  if (!std::isfinite(min_width)) return theta;

  double value = model.psi(theta).dot(v);
  double step = -1.0;
  for (int it = 0; it < max_steps; ++it) {
    const Vector grad = model.tangent(theta, model.jacobian(theta).transpose() * v);
    const double gmax = grad.lpNorm<Eigen::Infinity>();
    if (gmax == 0.0) break;
    if (step < 0.0) step = 0.05 * min_width / gmax;

    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const ParameterPoint cand = model.retract(theta - step * grad);
      const double decrease = grad.dot(theta - cand);
      if (decrease <= 0.0) break;
      const double cand_value = model.psi(cand).dot(v);
      if (cand_value <= value - 1e-4 * decrease) {
        theta = cand;
        value = cand_value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    step *= 2.0;
  }
  return theta;
}

}  // namespace adcg
