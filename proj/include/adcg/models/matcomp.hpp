#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "adcg/forward_model.hpp"
#include "adcg/loss.hpp"

namespace adcg::models {

struct Entry {
  int row = 0;
  int col = 0;
};

struct SingularTriple {
  double sigma = 0.0;
  Vector u;
  Vector v;
  bool converged = false;
  int matvecs = 0;
};

struct MatCompParams {
  int max_matvecs = 300;
  double tolerance = 1e-9;
  std::uint64_t seed = 0;
};

/// Top singular triple of a sparse matrix via Golub-Kahan-Lanczos
/// bidiagonalization with full reorthogonalization and explicit restarts.
SingularTriple top_singular_triple(const Eigen::SparseMatrix<double>& S, const MatCompParams& params);

/// Rank-one atoms u v^T with unit u in R^rows, unit v in R^cols, observed
/// through the sampling mask `omega`.  theta stacks (u; v).
class MatCompModel final : public ForwardModel {
 public:
  MatCompModel(int rows, int cols, std::vector<Entry> omega, MatCompParams params = {});

  std::size_t output_dim() const override { return omega_.size(); }
  std::size_t param_dim() const override { return static_cast<std::size_t>(rows_ + cols_); }
  const std::vector<Interval>& box() const override { return box_; }

  /// Rejects u or v whose norm differs from one by more than 1e-9.
  Vector psi(const ParameterPoint& theta) const override;
  Matrix jacobian(const ParameterPoint& theta) const override;
  Vector jacobian_apply(const ParameterPoint& theta, const Vector& dtheta) const override;
  Vector jacobian_transpose_apply(const ParameterPoint& theta, const Vector& v) const override;
  ParameterPoint lmo(const Vector& v) const override;

  /// Normalizes u and v.
  ParameterPoint retract(const ParameterPoint& theta) const override;
  /// Projects each block onto the tangent space of its sphere.
  Vector tangent(const ParameterPoint& theta, const Vector& grad) const override;
  bool contains(const ParameterPoint& theta, double slack = 1e-12) const override;

  /// Mask of an arbitrary (not necessarily unit) outer product u v^T.
  Vector sample_outer(const Vector& u, const Vector& v) const;
  /// Scatters v into the sparse rows x cols matrix M^* v.
  Eigen::SparseMatrix<double> adjoint(const Vector& v) const;
  /// One Riemannian gradient step with Armijo line search on the sphere product.
  std::vector<ParameterPoint> local_descent_step(const std::vector<ParameterPoint>& support,
                                                 const Vector& weights, const Vector& y,
                                                 const Loss& loss) const;

  ParameterPoint pack(const Vector& u, const Vector& v) const;
  std::pair<Vector, Vector> unpack(const ParameterPoint& theta) const;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<Entry>& omega() const { return omega_; }

 private:
  int rows_;
  int cols_;
  std::vector<Entry> omega_;
  MatCompParams params_;
  std::vector<Interval> box_;
};

}  // namespace adcg::models
