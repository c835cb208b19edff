#include "adcg/models/superres.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace adcg::models {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Phi(hi) - Phi(lo) for the standard normal, accurate in both tails.
double normal_mass(double lo, double hi) {
  if (lo >= 0.0) return 0.5 * (std::erfc(lo * kInvSqrt2) - std::erfc(hi * kInvSqrt2));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi * kInvSqrt2) - std::erfc(-lo * kInvSqrt2));
  return 1.0 - 0.5 * (std::erfc(-lo * kInvSqrt2) + std::erfc(hi * kInvSqrt2));
}

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

}  // namespace

SuperresModel::SuperresModel(SuperresParams params) : params_(params) {
  if (params_.grid_w < 1 || params_.grid_h < 1) throw std::invalid_argument("SuperresModel: empty grid");
  if (!(params_.pixel_size > 0.0)) throw std::invalid_argument("SuperresModel: pixel_size must be positive");
  if (!(params_.sigma > 0.0)) throw std::invalid_argument("SuperresModel: sigma must be positive");
  box_ = {{0.0, params_.grid_w * params_.pixel_size}, {0.0, params_.grid_h * params_.pixel_size}};

  grid_x_.resize(params_.grid_w, params_.grid_w);
  for (int i = 0; i < params_.grid_w; ++i) grid_x_.row(i) = axis_mass((i + 0.5) * params_.pixel_size, params_.grid_w).transpose();
  grid_y_.resize(params_.grid_h, params_.grid_h);
  for (int j = 0; j < params_.grid_h; ++j) grid_y_.row(j) = axis_mass((j + 0.5) * params_.pixel_size, params_.grid_h).transpose();
}

std::size_t SuperresModel::output_dim() const {
  return static_cast<std::size_t>(params_.grid_w) * static_cast<std::size_t>(params_.grid_h);
}

// Pixels whose both edges lie beyond kCutoff standard deviations carry mass
// and slope below 1e-30 of the peak; they are left at exactly zero.
std::pair<int, int> SuperresModel::window(double center, int pixels) const {
  constexpr double kCutoff = 12.0;
  const double s = params_.pixel_size;
  const double reach = kCutoff * params_.sigma;
  const int first = std::clamp(static_cast<int>(std::floor((center - reach) / s)), 0, pixels);
  const int last = std::clamp(static_cast<int>(std::ceil((center + reach) / s)), 0, pixels);
  return {first, last};
}

Vector SuperresModel::axis_mass(double center, int pixels) const {
  const double s = params_.pixel_size;
  const double inv = 1.0 / params_.sigma;
  Vector out = Vector::Zero(pixels);
  const auto [first, last] = window(center, pixels);
  for (int a = first; a < last; ++a) out[a] = normal_mass((a * s - center) * inv, ((a + 1) * s - center) * inv);
  return out;
}

Vector SuperresModel::axis_mass_derivative(double center, int pixels) const {
  const double s = params_.pixel_size;
  const double inv = 1.0 / params_.sigma;
  Vector out = Vector::Zero(pixels);
  const auto [first, last] = window(center, pixels);
  for (int a = first; a < last; ++a) {
    out[a] = -(normal_pdf(((a + 1) * s - center) * inv) - normal_pdf((a * s - center) * inv)) * inv;
  }
  return out;
}

Vector SuperresModel::psi(const ParameterPoint& theta) const {
  check_point(theta);
  const Vector gx = axis_mass(theta[0], params_.grid_w);
  const Vector gy = axis_mass(theta[1], params_.grid_h);
  Vector out(static_cast<Eigen::Index>(output_dim()));
  for (int b = 0; b < params_.grid_h; ++b) out.segment(static_cast<Eigen::Index>(b) * params_.grid_w, params_.grid_w) = gy[b] * gx;
  return out;
}

Matrix SuperresModel::jacobian(const ParameterPoint& theta) const {
  check_point(theta);
  const Vector gx = axis_mass(theta[0], params_.grid_w);
  const Vector gy = axis_mass(theta[1], params_.grid_h);
  const Vector dx = axis_mass_derivative(theta[0], params_.grid_w);
  const Vector dy = axis_mass_derivative(theta[1], params_.grid_h);
  Matrix j(static_cast<Eigen::Index>(output_dim()), 2);
  for (int b = 0; b < params_.grid_h; ++b) {
    const Eigen::Index off = static_cast<Eigen::Index>(b) * params_.grid_w;
    j.col(0).segment(off, params_.grid_w) = gy[b] * dx;
    j.col(1).segment(off, params_.grid_w) = dy[b] * gx;
  }
  return j;
}

Vector SuperresModel::jacobian_apply(const ParameterPoint& theta, const Vector& dtheta) const {
  check_point(theta);
  const Vector gx = axis_mass(theta[0], params_.grid_w);
  const Vector gy = axis_mass(theta[1], params_.grid_h);
  const Vector col_x = dtheta[0] * axis_mass_derivative(theta[0], params_.grid_w);
  const Vector dy = dtheta[1] * axis_mass_derivative(theta[1], params_.grid_h);
  Vector out(static_cast<Eigen::Index>(output_dim()));
  for (int b = 0; b < params_.grid_h; ++b) {
    out.segment(static_cast<Eigen::Index>(b) * params_.grid_w, params_.grid_w) = gy[b] * col_x + dy[b] * gx;
  }
  return out;
}

Vector SuperresModel::jacobian_transpose_apply(const ParameterPoint& theta, const Vector& v) const {
  check_point(theta);
  if (static_cast<std::size_t>(v.size()) != output_dim()) {
    throw DimensionError("SuperresModel::jacobian_transpose_apply: wrong vector length");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> image(v.data(), params_.grid_h, params_.grid_w);
  const Vector gx = axis_mass(theta[0], params_.grid_w);
  const Vector gy = axis_mass(theta[1], params_.grid_h);
  const Vector dx = axis_mass_derivative(theta[0], params_.grid_w);
  const Vector dy = axis_mass_derivative(theta[1], params_.grid_h);
  return Vector{{gy.dot(image * dx), dy.dot(image * gx)}};
}

ParameterPoint SuperresModel::lmo(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != output_dim()) {
    throw DimensionError(fmt::format("SuperresModel::lmo: vector has length {}, expected {}", v.size(), output_dim()));
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> image(v.data(), params_.grid_h, params_.grid_w);
  const Matrix values = grid_y_ * image * grid_x_.transpose();

  Eigen::Index best_i = 0;
  Eigen::Index best_j = 0;
  double best = values(0, 0);
  for (Eigen::Index j = 0; j < values.rows(); ++j) {
    for (Eigen::Index i = 0; i < values.cols(); ++i) {
      if (values(j, i) < best) {
        best = values(j, i);
        best_i = i;
        best_j = j;
      }
    }
  }
  ParameterPoint theta(2);
  theta << (best_i + 0.5) * params_.pixel_size, (best_j + 0.5) * params_.pixel_size;
  return polish_linear_objective(*this, v, theta, params_.lmo_polish_steps);
}

}  // namespace adcg::models
