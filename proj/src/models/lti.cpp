#include "adcg/models/lti.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace adcg::models {

LtiModel::LtiModel(Vector input, LtiParams params) : input_(std::move(input)), params_(params) {
  if (input_.size() < 1) throw std::invalid_argument("LtiModel: input sequence is empty");
  if (params_.r_grid < 2 || params_.alpha_grid < 2) throw std::invalid_argument("LtiModel: LMO grid needs >= 2 nodes per axis");
  box_ = {{-1.0, 1.0}, {-1.0, 1.0}, {0.0, 1.0}, {0.0, std::numbers::pi}, {-1.0, 1.0}, {-1.0, 1.0}};
}

Vector LtiModel::psi(const ParameterPoint& theta) const {
  check_point(theta);
  const double r = theta[2];
  const double c = r * std::cos(theta[3]);
  const double s = r * std::sin(theta[3]);
  double x1 = theta[0];
  double x2 = theta[1];
  Vector out(input_.size());
  for (Eigen::Index t = 0; t < input_.size(); ++t) {
    const double u = input_[t];
    const double n1 = c * x1 - s * x2 + theta[4] * u;
    const double n2 = s * x1 + c * x2 + theta[5] * u;
    x1 = n1;
    x2 = n2;
    out[t] = x1;
  }
  return out;
}

Matrix LtiModel::jacobian(const ParameterPoint& theta) const {
  check_point(theta);
  const double r = theta[2];
  const double ca = std::cos(theta[3]);
  const double sa = std::sin(theta[3]);
  Eigen::Matrix2d a;
  a << r * ca, -r * sa, r * sa, r * ca;
  Eigen::Matrix2d da_dr;
  da_dr << ca, -sa, sa, ca;
  Eigen::Matrix2d da_dalpha;
  da_dalpha << -r * sa, -r * ca, r * ca, -r * sa;

  Eigen::Vector2d x(theta[0], theta[1]);
  const Eigen::Vector2d b(theta[4], theta[5]);
  Eigen::Matrix<double, 2, 6> sens = Eigen::Matrix<double, 2, 6>::Zero();
  sens(0, 0) = 1.0;
  sens(1, 1) = 1.0;

  Matrix j(input_.size(), 6);
  for (Eigen::Index t = 0; t < input_.size(); ++t) {
    const double u = input_[t];
    Eigen::Matrix<double, 2, 6> next = a * sens;
    next.col(2) += da_dr * x;
    next.col(3) += da_dalpha * x;
    next(0, 4) += u;
    next(1, 5) += u;
    x = a * x + b * u;
    sens = next;
    j.row(t) = sens.row(0);
  }
  return j;
}

ParameterPoint LtiModel::lmo(const Vector& v) const {
  if (v.size() != input_.size()) {
    throw DimensionError(fmt::format("LtiModel::lmo: vector has length {}, expected {}", v.size(), input_.size()));
  }
  ParameterPoint best(6);
  double best_value = 0.0;
  bool have = false;

  for (int i = 0; i < params_.r_grid; ++i) {
    const double r = static_cast<double>(i) / (params_.r_grid - 1);
    for (int k = 0; k < params_.alpha_grid; ++k) {
      const double alpha = std::numbers::pi * k / (params_.alpha_grid - 1);
      const double c = r * std::cos(alpha);
      const double s = r * std::sin(alpha);
      // Four unit responses: x0 = e1, x0 = e2, B = e1, B = e2.
      Eigen::Matrix<double, 2, 4> x;
      x << 1.0, 0.0, 0.0, 0.0,
           0.0, 1.0, 0.0, 0.0;
      Eigen::Vector4d corr = Eigen::Vector4d::Zero();
      for (Eigen::Index t = 0; t < input_.size(); ++t) {
        const double u = input_[t];
        const Eigen::Matrix<double, 1, 4> n1 = c * x.row(0) - s * x.row(1);
        const Eigen::Matrix<double, 1, 4> n2 = s * x.row(0) + c * x.row(1);
        x.row(0) = n1;
        x.row(1) = n2;
        x(0, 2) += u;
        x(1, 3) += u;
        corr += v[t] * x.row(0).transpose();
      }
      Eigen::Vector4d z;
      for (int q = 0; q < 4; ++q) z[q] = corr[q] > 0.0 ? -1.0 : 1.0;
      const double value = z.dot(corr);
      if (!have || value < best_value) {
        have = true;
        best_value = value;
        best << z[0], z[1], r, alpha, z[2], z[3];
      }
    }
  }
  return polish_linear_objective(*this, v, best, params_.lmo_polish_steps);
}

}  // namespace adcg::models
