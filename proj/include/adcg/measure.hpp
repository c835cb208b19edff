#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adcg/forward_model.hpp"
#include "adcg/types.hpp"

namespace adcg {

struct Atom {
  double weight = 0.0;
  ParameterPoint theta;
};

/// Finite nonnegative combination of point masses, sum_i w_i delta(theta_i).
/// Atom order is insertion order and is preserved by every operation here.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const { return atoms_; }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  double total_mass() const;
  Vector weights() const;
  std::vector<ParameterPoint> support() const;

  /// Same support, new weights (must be nonnegative, same length).
  AtomicMeasure with_weights(const Vector& w) const;

 private:
  std::vector<Atom> atoms_;
};

/// Builds a measure from parallel support/weight lists.
AtomicMeasure make_measure(const std::vector<ParameterPoint>& support, const Vector& weights);

/// Concatenation of two measures (atoms of `a` first).
AtomicMeasure combine(const AtomicMeasure& a, const AtomicMeasure& b);

/// Phi mu = sum_i w_i psi(theta_i).
Vector apply_forward(const ForwardModel& model, const AtomicMeasure& mu);

/// Phi mu - y.
Vector residual(const ForwardModel& model, const AtomicMeasure& mu, const Vector& y);

/// d x m matrix whose columns are psi(theta_i).
Matrix measurement_matrix(const ForwardModel& model, const std::vector<ParameterPoint>& support);

/// Drops atoms with weight <= tol.
AtomicMeasure prune_zero_weights(const AtomicMeasure& mu, double tol);

/// Merges atoms closer than `tol` in box-normalized coordinates; weights are
/// summed onto the earliest atom of each group.
AtomicMeasure merge_duplicates(const ForwardModel& model, const AtomicMeasure& mu,
                               double tol = 1e-12);

/// Reduces the support to at most d+1 atoms without changing Phi mu or the
/// total mass.  Each pass zeroes exactly one weight along a null-space
/// direction of the stacked (psi; 1) matrix.  Throws NumericalError when no
/// usable direction is found.
AtomicMeasure caratheodory_prune(const ForwardModel& model, const AtomicMeasure& mu);

}  // namespace adcg
