#pragma once

#include <cstdint>

#include "adcg/bench/io.hpp"
#include "adcg/measure.hpp"

namespace adcg::bench {

struct TwoSourceOptions {
  int grid = 64;
  double pixel_size = 100.0;  ///< nm
  double sigma_px = 1.0;
  double separation_px = 1.5;
  double snr_db = 20.0;       ///< mean signal power per pixel over noise variance
  int frames = 50;
  double intensity = 1000.0;  ///< each source draws from [0.8, 1.2] x intensity
};

/// Frames with two sources at a fixed separation, random center and
/// orientation, plus additive white Gaussian noise.
FrameStack generate_two_source(const TwoSourceOptions& options, std::uint64_t seed);

struct LowRankOptions {
  int rows = 50;
  int cols = 40;
  int rank = 3;
  double observed_fraction = 0.3;
};

struct LowRankData {
  RatingsData ratings;   ///< train = observed entries, test = the rest
  Matrix truth;          ///< full rating matrix
  double centered_nuclear_norm = 0.0;  ///< ||truth - train_mean||_*
};

/// Ratings 3 + L with L of rank (rank - 1) scaled into [-1.9, 1.9], so the
/// rating matrix has exactly the given rank.
LowRankData generate_low_rank(const LowRankOptions& options, std::uint64_t seed);

struct LtiOptions {
  int horizon = 400;
  int train_length = 300;
};

struct LtiData {
  IOSequence sequence;
  AtomicMeasure truth;  ///< two atoms with distinct (r, alpha)
};

/// White-noise input, noiseless output of a planted two-atom system.
LtiData generate_lti(const LtiOptions& options, std::uint64_t seed);

}  // namespace adcg::bench
