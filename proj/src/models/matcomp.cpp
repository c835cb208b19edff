#include "adcg/models/matcomp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "adcg/solver.hpp"

namespace adcg::models {

namespace {

void orthogonalize(Vector& x, const Matrix& basis, Eigen::Index count) {
  if (count == 0) return;
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass) {
    const Vector coeffs = basis.leftCols(count).transpose() * x;
    x.noalias() -= basis.leftCols(count) * coeffs;
  }
}

void fix_sign(Vector& u, Vector& v) {
  Eigen::Index idx = 0;
  u.cwiseAbs().maxCoeff(&idx);
  if (u[idx] < 0.0) {
    u = -u;
    v = -v;
  }
}

}  // namespace

SingularTriple top_singular_triple(const Eigen::SparseMatrix<double>& S, const MatCompParams& params) {
  const Eigen::Index n = S.rows();
  const Eigen::Index m = S.cols();
  SingularTriple out;
  out.u = Vector::Zero(n);
  out.v = Vector::Zero(m);
  out.u[0] = 1.0;
  out.v[0] = 1.0;
  const double scale = S.norm();
  if (scale == 0.0) {
    out.converged = true;
    return out;
  }

  const Eigen::Index kmax = std::min<Eigen::Index>({n, m, 80});
  const double breakdown = 1e-14 * scale;
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal;
  Vector start(m);
  for (Eigen::Index i = 0; i < m; ++i) start[i] = normal(rng);
  start.normalize();

  while (true) {
    Matrix P(m, kmax + 1);
    Matrix Q(n, kmax);
    std::vector<double> alpha;
    std::vector<double> beta;
    P.col(0) = start;
    Eigen::Index steps = 0;
    bool done = false;
    Vector ub;
    Vector vb;
    double sigma = 0.0;

    for (Eigen::Index j = 0; j < kmax; ++j) {
      Vector q = S * P.col(j);
      if (j > 0) q -= beta[static_cast<std::size_t>(j - 1)] * Q.col(j - 1);
      orthogonalize(q, Q, j);
      ++out.matvecs;
      const double a = q.norm();
      // When S P_j already lies in span(Q) the Krylov space is invariant; a
      // zero diagonal entry keeps the last beta coupling in the projected
      // matrix so its top singular value is still exact.
      const bool invariant = a <= breakdown;
      alpha.push_back(invariant ? 0.0 : a);
      Q.col(j) = invariant ? Vector::Zero(n) : Vector(q / a);
      double b = 0.0;
      Vector p;
      if (!invariant) {
        p = S.transpose() * Q.col(j) - a * P.col(j);
        orthogonalize(p, P, j + 1);
        b = p.norm();
      }
      beta.push_back(b);
      steps = j + 1;

      Matrix B = Matrix::Zero(steps, steps);
      for (Eigen::Index i = 0; i < steps; ++i) {
        B(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < steps) B(i, i + 1) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
      sigma = svd.singularValues()[0];
      ub = svd.matrixU().col(0);
      vb = svd.matrixV().col(0);
      const double resid = b * std::abs(ub[steps - 1]);
      if (invariant || resid <= params.tolerance * sigma || b <= breakdown) {
        done = true;
        break;
      }
      if (out.matvecs >= params.max_matvecs) break;
      P.col(j + 1) = p / b;
    }

    if (steps > 0) {
      out.sigma = sigma;
      out.u = (Q.leftCols(steps) * ub).normalized();
      out.v = (P.leftCols(steps) * vb).normalized();
    }
    if (done) {
      out.converged = true;
      break;
    }
    if (out.matvecs >= params.max_matvecs || steps == 0) break;
    start = out.v;
  }
  fix_sign(out.u, out.v);
  return out;
}

MatCompModel::MatCompModel(int rows, int cols, std::vector<Entry> omega, MatCompParams params)
    : rows_(rows), cols_(cols), omega_(std::move(omega)), params_(params) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("MatCompModel: empty matrix shape");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : omega_) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
      throw std::invalid_argument(fmt::format("MatCompModel: entry ({}, {}) outside {}x{}", e.row, e.col, rows, cols));
    }
    if (!seen.insert({e.row, e.col}).second) {
      throw std::invalid_argument(fmt::format("MatCompModel: duplicate entry ({}, {})", e.row, e.col));
    }
  }
  box_.assign(static_cast<std::size_t>(rows + cols), Interval{-1.0, 1.0});
}

ParameterPoint MatCompModel::pack(const Vector& u, const Vector& v) const {
  if (u.size() != rows_ || v.size() != cols_) throw DimensionError("MatCompModel::pack: wrong factor length");
  ParameterPoint theta(rows_ + cols_);
  theta << u, v;
  return theta;
}

std::pair<Vector, Vector> MatCompModel::unpack(const ParameterPoint& theta) const {
  check_point(theta);
  return {theta.head(rows_), theta.tail(cols_)};
}

Vector MatCompModel::sample_outer(const Vector& u, const Vector& v) const {
  Vector out(static_cast<Eigen::Index>(omega_.size()));
  for (std::size_t j = 0; j < omega_.size(); ++j) out[static_cast<Eigen::Index>(j)] = u[omega_[j].row] * v[omega_[j].col];
  return out;
}

Vector MatCompModel::psi(const ParameterPoint& theta) const {
  const auto [u, v] = unpack(theta);
  if (std::abs(u.norm() - 1.0) > 1e-9 || std::abs(v.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument(fmt::format("MatCompModel::psi: factors must have unit norm (got {}, {})", u.norm(), v.norm()));
  }
  return sample_outer(u, v);
}

Matrix MatCompModel::jacobian(const ParameterPoint& theta) const {
  const auto [u, v] = unpack(theta);
  Matrix j = Matrix::Zero(static_cast<Eigen::Index>(omega_.size()), rows_ + cols_);
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    j(r, omega_[k].row) = v[omega_[k].col];
    j(r, rows_ + omega_[k].col) = u[omega_[k].row];
  }
  return j;
}

Vector MatCompModel::jacobian_apply(const ParameterPoint& theta, const Vector& dtheta) const {
  const auto [u, v] = unpack(theta);
  const auto [du, dv] = unpack(dtheta);
  Vector out(static_cast<Eigen::Index>(omega_.size()));
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const auto& e = omega_[k];
    out[static_cast<Eigen::Index>(k)] = du[e.row] * v[e.col] + u[e.row] * dv[e.col];
  }
  return out;
}

Vector MatCompModel::jacobian_transpose_apply(const ParameterPoint& theta, const Vector& r) const {
  if (static_cast<std::size_t>(r.size()) != omega_.size()) {
    throw DimensionError("MatCompModel::jacobian_transpose_apply: wrong vector length");
  }
  const auto [u, v] = unpack(theta);
  Vector out = Vector::Zero(rows_ + cols_);
  for (std::size_t k = 0; k < omega_.size(); ++k) {
    const auto& e = omega_[k];
    const double rk = r[static_cast<Eigen::Index>(k)];
    out[e.row] += rk * v[e.col];
    out[rows_ + e.col] += rk * u[e.row];
  }
  return out;
}

Eigen::SparseMatrix<double> MatCompModel::adjoint(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != omega_.size()) throw DimensionError("MatCompModel::adjoint: wrong vector length");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(omega_.size());
  for (std::size_t j = 0; j < omega_.size(); ++j) triplets.emplace_back(omega_[j].row, omega_[j].col, v[static_cast<Eigen::Index>(j)]);
  Eigen::SparseMatrix<double> s(rows_, cols_);
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

ParameterPoint MatCompModel::lmo(const Vector& v) const {
  const SingularTriple top = top_singular_triple(adjoint(v), params_);
  return pack(-top.u, top.v);
}

ParameterPoint MatCompModel::retract(const ParameterPoint& theta) const {
  check_point(theta);
  auto unit = [](Vector x) {
    const double n = x.norm();
    if (n == 0.0 || !std::isfinite(n)) {
      x.setZero();
      x[0] = 1.0;
      return x;
    }
    return Vector(x / n);
  };
  return pack(unit(theta.head(rows_)), unit(theta.tail(cols_)));
}

Vector MatCompModel::tangent(const ParameterPoint& theta, const Vector& grad) const {
  Vector out = grad;
  const Vector u = theta.head(rows_);
  const Vector v = theta.tail(cols_);
  out.head(rows_) -= u.dot(grad.head(rows_)) * u;
  out.tail(cols_) -= v.dot(grad.tail(cols_)) * v;
  return out;
}

bool MatCompModel::contains(const ParameterPoint& theta, double slack) const {
  if (theta.size() != rows_ + cols_ || !theta.allFinite()) return false;
  const double tol = std::max(slack, 1e-9);
  return std::abs(theta.head(rows_).norm() - 1.0) <= tol && std::abs(theta.tail(cols_).norm() - 1.0) <= tol;
}

std::vector<ParameterPoint> MatCompModel::local_descent_step(const std::vector<ParameterPoint>& support,
                                                             const Vector& weights, const Vector& y,
                                                             const Loss& loss) const {
  return local_descent(*this, support, weights, y, loss, 1);
}

}  // namespace adcg::models
