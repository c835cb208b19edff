#include "adcg/bench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/SVD>

#include "adcg/models/lti.hpp"
#include "adcg/models/superres.hpp"

namespace adcg::bench {

FrameStack generate_two_source(const TwoSourceOptions& options, std::uint64_t seed) {
  const models::SuperresModel model(
      {options.grid, options.grid, options.pixel_size, options.sigma_px * options.pixel_size});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  FrameStack stack;
  stack.grid_w = options.grid;
  stack.grid_h = options.grid;
  const double s = options.pixel_size;
  for (int f = 0; f < options.frames; ++f) {
    const double cx = (0.25 + 0.5 * unit(rng)) * options.grid * s;
    const double cy = (0.25 + 0.5 * unit(rng)) * options.grid * s;
    const double angle = std::numbers::pi * unit(rng);
    const double half = 0.5 * options.separation_px * s;
    std::vector<Source> truth = {
        {cx + half * std::cos(angle), cy + half * std::sin(angle), options.intensity * (0.8 + 0.4 * unit(rng))},
        {cx - half * std::cos(angle), cy - half * std::sin(angle), options.intensity * (0.8 + 0.4 * unit(rng))},
    };
    Vector image = Vector::Zero(static_cast<Eigen::Index>(model.output_dim()));
    for (const auto& src : truth) image += src.weight * model.psi(Eigen::Vector2d(src.x, src.y));
    const double signal_power = image.squaredNorm() / static_cast<double>(image.size());
    const double noise_sd = std::sqrt(signal_power / std::pow(10.0, options.snr_db / 10.0));
    for (Eigen::Index i = 0; i < image.size(); ++i) image[i] += noise_sd * normal(rng);
    stack.frames.push_back({std::move(image), std::move(truth)});
  }
  return stack;
}

LowRankData generate_low_rank(const LowRankOptions& options, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // The constant offset is one of the rank components, so the rating matrix
  // itself has exactly the requested rank.
  const int varying = std::max(0, options.rank - 1);
  Matrix u(options.rows, varying);
  Matrix v(options.cols, varying);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = normal(rng);
  Matrix low = u * v.transpose();
  if (varying > 0) low *= 1.9 / low.cwiseAbs().maxCoeff();

  LowRankData out;
  out.truth = (low.array() + 3.0).matrix();

  std::vector<int> order(static_cast<std::size_t>(options.rows * options.cols));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto observed = static_cast<std::size_t>(std::lround(options.observed_fraction * static_cast<double>(order.size())));
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(observed));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(observed), order.end());

  std::vector<Rating> train;
  std::vector<Rating> test;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int i = order[k] / options.cols;
    const int j = order[k] % options.cols;
    (k < observed ? train : test).push_back({i, j, out.truth(i, j)});
  }
  out.ratings = make_ratings_data(std::move(train), std::move(test), options.rows, options.cols);
  const Matrix centered = (out.truth.array() - out.ratings.train_mean).matrix();
  out.centered_nuclear_norm = Eigen::JacobiSVD<Matrix>(centered).singularValues().sum();
  return out;
}

LtiData generate_lti(const LtiOptions& options, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  LtiData out;
  out.sequence.u.resize(options.horizon);
  for (Eigen::Index t = 0; t < options.horizon; ++t) out.sequence.u[t] = normal(rng);
  out.sequence.train_length = options.train_length;

  auto sym = [&] { return 2.0 * unit(rng) - 1.0; };
  std::vector<Atom> atoms;
  // Distinct modes: a slow low-frequency one and a faster high-frequency one.
  const double r[2] = {0.80 + 0.15 * unit(rng), 0.70 + 0.15 * unit(rng)};
  const double alpha[2] = {0.3 + 0.8 * unit(rng), 1.8 + 0.9 * unit(rng)};
  for (int k = 0; k < 2; ++k) {
    ParameterPoint theta(6);
    theta << sym(), sym(), r[k], alpha[k], sym(), sym();
    atoms.push_back({0.5 + unit(rng), theta});
  }
  out.truth = AtomicMeasure(std::move(atoms));

  const models::LtiModel model(out.sequence.u);
  out.sequence.y = apply_forward(model, out.truth);
  return out;
}

}  // namespace adcg::bench
