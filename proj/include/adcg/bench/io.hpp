#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adcg/bench/metrics.hpp"
#include "adcg/types.hpp"

namespace adcg::bench {

/// Malformed or inconsistent input data; the message names the file and line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Frame {
  Vector image;  ///< row-major, length grid_w * grid_h
  std::optional<std::vector<Source>> truth;
};

struct FrameStack {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<Frame> frames;
};

struct RatingsData {
  int rows = 0;
  int cols = 0;
  std::vector<Rating> train;
  std::vector<Rating> test;
  double train_mean = 0.0;
};

struct IOSequence {
  Vector u;
  Vector y;
  int train_length = 0;
};

/// Frames CSV: `frame,p0,...,p{W-1}`, one line per pixel row, rows of a frame
/// consecutive.  Ground truth CSV: `frame,x_nm,y_nm,intensity`.  A
/// non-numeric first line is treated as a header; `#` starts a comment line.
FrameStack load_frames(const std::filesystem::path& frames_path,
                       const std::optional<std::filesystem::path>& truth_path = std::nullopt);

/// Ratings CSV: `user,item,rating` with 0-based indices inside rows x cols.
std::vector<Rating> load_ratings(const std::filesystem::path& path, int rows, int cols);

RatingsData make_ratings_data(std::vector<Rating> train, std::vector<Rating> test, int rows, int cols);

/// IO CSV: `u,y`, one line per time step.  train_length 0 means no split.
IOSequence load_io(const std::filesystem::path& path, int train_length);

/// Estimates / truth CSV `frame,x_nm,y_nm,weight` grouped per frame.
std::vector<std::vector<Source>> load_sources(const std::filesystem::path& path);

/// Predictions CSV `t,y_pred`.
std::vector<std::pair<int, double>> load_predictions(const std::filesystem::path& path);

void write_frames(const std::filesystem::path& path, const FrameStack& stack);
void write_truth(const std::filesystem::path& path, const FrameStack& stack);
void write_ratings(const std::filesystem::path& path, const std::vector<Rating>& ratings);
void write_io(const std::filesystem::path& path, const IOSequence& seq);

}  // namespace adcg::bench
