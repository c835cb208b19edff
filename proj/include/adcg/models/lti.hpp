#pragma once

#include "adcg/forward_model.hpp"

namespace adcg::models {

struct LtiParams {
  int r_grid = 50;
  int alpha_grid = 50;
  int lmo_polish_steps = 100;
};

/// Output of a two-state LTI system driven by a fixed input sequence.
///
/// theta = (x0_1, x0_2, r, alpha, B_1, B_2) with x0, B in [-1, 1]^2,
/// r in [0, 1], alpha in [0, pi].  A = r * rot(alpha), C = [1 0].
/// With inputs u[0..T-1], x_{t+1} = A x_t + B u[t] and output entry t is
/// C x_{t+1}, so psi has length T.
class LtiModel final : public ForwardModel {
 public:
  explicit LtiModel(Vector input, LtiParams params = {});

  std::size_t output_dim() const override { return static_cast<std::size_t>(input_.size()); }
  std::size_t param_dim() const override { return 6; }
  const std::vector<Interval>& box() const override { return box_; }
  Vector psi(const ParameterPoint& theta) const override;
  /// Forward sensitivity recursion.
  Matrix jacobian(const ParameterPoint& theta) const override;
  /// Grid over (r, alpha); the optimal (x0, B) at each node is a box vertex.
  ParameterPoint lmo(const Vector& v) const override;

  const Vector& input() const { return input_; }

 private:
  Vector input_;
  LtiParams params_;
  std::vector<Interval> box_;
};

}  // namespace adcg::models
