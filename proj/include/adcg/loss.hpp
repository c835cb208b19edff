#pragma once

#include "adcg/types.hpp"

namespace adcg {

/// Smooth convex loss of the residual Phi mu - y.
class Loss {
 public:
  virtual ~Loss() = default;
  virtual double value(const Vector& r) const = 0;
  virtual Vector gradient(const Vector& r) const = 0;
  /// True for 0.5 ||r||^2; lets the weight solver work on the Gram matrix.
  virtual bool is_squared() const { return false; }
};

double squared_loss_value(const Vector& r);
Vector squared_loss_gradient(const Vector& r);

class SquaredLoss final : public Loss {
 public:
  double value(const Vector& r) const override { return squared_loss_value(r); }
  Vector gradient(const Vector& r) const override { return squared_loss_gradient(r); }
  bool is_squared() const override { return true; }
};

}  // namespace adcg
