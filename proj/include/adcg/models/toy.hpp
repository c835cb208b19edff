#pragma once

#include "adcg/forward_model.hpp"

namespace adcg::models {

/// psi(theta) = (theta, theta^2, ..., theta^degree) on a closed interval.
/// Small enough that the oracle is exact: for degree <= 3 the minimizer of
/// <psi, v> is found among the endpoints and the stationary points.
class MomentCurveModel final : public ForwardModel {
 public:
  MomentCurveModel(int degree, double lo, double hi);

  std::size_t output_dim() const override { return static_cast<std::size_t>(degree_); }
  std::size_t param_dim() const override { return 1; }
  const std::vector<Interval>& box() const override { return box_; }
  Vector psi(const ParameterPoint& theta) const override;
  Matrix jacobian(const ParameterPoint& theta) const override;
  ParameterPoint lmo(const Vector& v) const override;
  bool lmo_is_exact() const override { return true; }

 private:
  int degree_;
  std::vector<Interval> box_;
};

}  // namespace adcg::models
