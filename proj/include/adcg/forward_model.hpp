#pragma once

#include <cstddef>
#include <vector>

#include "adcg/types.hpp"

namespace adcg {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Measurement model of a single source.
///
/// A model maps a parameter point theta to its noiseless measurement
/// psi(theta) in R^d, supplies the Jacobian of that map, and an (approximate)
/// linear minimization oracle argmin_theta <psi(theta), v>.  Implementations
/// must be immutable after construction; every method may be called
/// concurrently.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual std::size_t output_dim() const = 0;
  virtual std::size_t param_dim() const = 0;

  /// Closed bounding intervals of the parameter set, one per coordinate.
  virtual const std::vector<Interval>& box() const = 0;

  virtual Vector psi(const ParameterPoint& theta) const = 0;

  /// d x p matrix of partial derivatives of psi.
  virtual Matrix jacobian(const ParameterPoint& theta) const = 0;

  /// J(theta) dtheta and J(theta)^T v; override when J is sparse.
  virtual Vector jacobian_apply(const ParameterPoint& theta, const Vector& dtheta) const;
  virtual Vector jacobian_transpose_apply(const ParameterPoint& theta, const Vector& v) const;
  virtual ParameterPoint lmo(const Vector& v) const = 0;

  /// True when lmo() returns a global minimizer up to rounding.
  virtual bool lmo_is_exact() const { return false; }

  /// Maps an arbitrary point back onto the parameter set (box clamp by default).
  virtual ParameterPoint retract(const ParameterPoint& theta) const;

  /// Removes gradient components that leave the parameter set at theta.
  virtual Vector tangent(const ParameterPoint& theta, const Vector& grad) const;


  /// Feasibility test with a small absolute slack.
  virtual bool contains(const ParameterPoint& theta, double slack = 1e-12) const;

  /// Euclidean distance after scaling every coordinate by its box width.
  double normalized_distance(const ParameterPoint& a, const ParameterPoint& b) const;

  void check_point(const ParameterPoint& theta) const;
};

/// Projected-gradient refinement of theta for the linear objective
/// <psi(theta), v>.  Only improving steps are accepted, so the returned value
/// never exceeds the value at the starting point.
ParameterPoint polish_linear_objective(const ForwardModel& model, const Vector& v,
                                       ParameterPoint theta, int max_steps);

}  // namespace adcg
