#pragma once

#include "adcg/forward_model.hpp"

namespace adcg::models {

struct SuperresParams {
  int grid_w = 64;
  int grid_h = 64;
  double pixel_size = 100.0;  ///< nm per pixel
  double sigma = 100.0;       ///< PSF standard deviation, nm
  int lmo_polish_steps = 100;
};

/// Pixelated 2D Gaussian point spread function.
///
/// theta = (x, y) in nm, box [0, grid_w * pixel_size] x [0, grid_h * pixel_size].
/// Pixel (a, b) (column a, row b) records the Gaussian mass over
/// [a s, (a+1) s] x [b s, (b+1) s]; images are stored row-major, index b * grid_w + a.
class SuperresModel final : public ForwardModel {
 public:
  explicit SuperresModel(SuperresParams params);

  std::size_t output_dim() const override;
  std::size_t param_dim() const override { return 2; }
  const std::vector<Interval>& box() const override { return box_; }
  Vector psi(const ParameterPoint& theta) const override;
  Matrix jacobian(const ParameterPoint& theta) const override;
  Vector jacobian_apply(const ParameterPoint& theta, const Vector& dtheta) const override;
  Vector jacobian_transpose_apply(const ParameterPoint& theta, const Vector& v) const override;
  /// Best pixel center by exhaustive search, then projected-gradient polish.
  ParameterPoint lmo(const Vector& v) const override;

  const SuperresParams& params() const { return params_; }

 private:
  /// Per-pixel Gaussian mass along one axis for a source at `center`.
  std::pair<int, int> window(double center, int pixels) const;
  Vector axis_mass(double center, int pixels) const;
  Vector axis_mass_derivative(double center, int pixels) const;

  SuperresParams params_;
  std::vector<Interval> box_;
  // Axis masses of sources at pixel centers: row i is the source at (i + 0.5) px.
  Matrix grid_x_;
  Matrix grid_y_;
};

}  // namespace adcg::models
