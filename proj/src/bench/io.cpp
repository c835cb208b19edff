#include "adcg/bench/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "adcg/serialize.hpp"

namespace adcg::bench {

namespace fs = std::filesystem;

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::vector<double> values;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

// Numeric CSV with an optional header line and '#' comments.
std::vector<CsvRow> read_numeric_csv(const fs::path& path, std::size_t expected_columns = 0) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open file", path.string()));
  std::vector<CsvRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split(view);
    CsvRow row{lineno, {}};
    row.values.reserve(fields.size());
    bool ok = true;
    for (const auto f : fields) {
      double x = 0.0;
      if (!parse_number(f, x)) {
        ok = false;
        break;
      }
      row.values.push_back(x);
    }
    if (!ok) {
      if (first_content) {
        first_content = false;
        continue;  // header
      }
      throw DataError(fmt::format("{}:{}: malformed numeric row", path.string(), lineno));
    }
    first_content = false;
    if (expected_columns != 0 && row.values.size() != expected_columns) {
      throw DataError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), lineno, expected_columns,
                                  row.values.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int as_index(double x, const fs::path& path, std::size_t line, const char* what) {
  if (x < 0.0 || x != std::floor(x) || x > 2e9) {
    throw DataError(fmt::format("{}:{}: {} must be a nonnegative integer", path.string(), line, what));
  }
  return static_cast<int>(x);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("{}: cannot open for writing", path.string()));
  return out;
}

}  // namespace

FrameStack load_frames(const fs::path& frames_path, const std::optional<fs::path>& truth_path) {
  const auto rows = read_numeric_csv(frames_path);
  if (rows.empty()) throw DataError(fmt::format("{}: no frame data", frames_path.string()));
  FrameStack stack;
  stack.grid_w = static_cast<int>(rows.front().values.size()) - 1;
  if (stack.grid_w < 1) throw DataError(fmt::format("{}:{}: frame rows need at least one pixel", frames_path.string(), rows.front().line));

  std::vector<std::vector<double>> pixels;
  int current = -1;
  int height = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.values.size()) != stack.grid_w + 1) {
      throw DataError(fmt::format("{}:{}: expected {} columns, found {}", frames_path.string(), row.line,
                                  stack.grid_w + 1, row.values.size()));
    }
    const int frame = as_index(row.values[0], frames_path, row.line, "frame index");
    if (frame != current) {
      if (frame != current + 1) {
        throw DataError(fmt::format("{}:{}: frame indices must be consecutive from 0", frames_path.string(), row.line));
      }
      if (current >= 0) {
        if (stack.grid_h == 0) stack.grid_h = height;
        if (height != stack.grid_h) {
          throw DataError(fmt::format("{}:{}: frame {} has {} rows, expected {}", frames_path.string(), row.line,
                                      current, height, stack.grid_h));
        }
      }
      current = frame;
      height = 0;
      pixels.emplace_back();
    }
    pixels.back().insert(pixels.back().end(), row.values.begin() + 1, row.values.end());
    ++height;
  }
  if (stack.grid_h == 0) stack.grid_h = height;
  if (height != stack.grid_h) {
    throw DataError(fmt::format("{}: last frame has {} rows, expected {}", frames_path.string(), height, stack.grid_h));
  }
  for (auto& p : pixels) {
    stack.frames.push_back({Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())), std::nullopt});
  }

  if (truth_path) {
    const auto truth = load_sources(*truth_path);
    if (truth.size() > stack.frames.size()) {
      throw DataError(fmt::format("{}: ground truth refers to frame {} but only {} frames exist", truth_path->string(),
                                  truth.size() - 1, stack.frames.size()));
    }
    for (std::size_t f = 0; f < stack.frames.size(); ++f) {
      stack.frames[f].truth = f < truth.size() ? truth[f] : std::vector<Source>{};
    }
  }
  return stack;
}

std::vector<std::vector<Source>> load_sources(const fs::path& path) {
  const auto rows = read_numeric_csv(path, 4);
  std::vector<std::vector<Source>> out;
  for (const auto& row : rows) {
    const int frame = as_index(row.values[0], path, row.line, "frame index");
    if (static_cast<std::size_t>(frame) >= out.size()) out.resize(static_cast<std::size_t>(frame) + 1);
    out[static_cast<std::size_t>(frame)].push_back({row.values[1], row.values[2], row.values[3]});
  }
  return out;
}

std::vector<Rating> load_ratings(const fs::path& path, int rows, int cols) {
  const auto data = read_numeric_csv(path, 3);
  std::vector<Rating> out;
  std::set<std::pair<int, int>> seen;
  for (const auto& row : data) {
    const int user = as_index(row.values[0], path, row.line, "user index");
    const int item = as_index(row.values[1], path, row.line, "item index");
    if (user >= rows || item >= cols) {
      throw DataError(fmt::format("{}:{}: entry ({}, {}) outside the {}x{} matrix", path.string(), row.line, user, item,
                                  rows, cols));
    }
    if (!seen.insert({user, item}).second) {
      throw DataError(fmt::format("{}:{}: duplicate rating for ({}, {})", path.string(), row.line, user, item));
    }
    out.push_back({user, item, row.values[2]});
  }
  return out;
}

RatingsData make_ratings_data(std::vector<Rating> train, std::vector<Rating> test, int rows, int cols) {
  RatingsData data;
  data.rows = rows;
  data.cols = cols;
  data.train = std::move(train);
  data.test = std::move(test);
  if (!data.train.empty()) {
    double s = 0.0;
    for (const auto& r : data.train) s += r.rating;
    data.train_mean = s / static_cast<double>(data.train.size());
  }
  return data;
}

IOSequence load_io(const fs::path& path, int train_length) {
  const auto rows = read_numeric_csv(path);
  IOSequence seq;
  seq.u.resize(static_cast<Eigen::Index>(rows.size()));
  seq.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].values.size() != 2) {
      throw DataError(fmt::format("{}:{}: expected 2 columns (u,y), found {}", path.string(), rows[i].line,
                                  rows[i].values.size()));
    }
    seq.u[static_cast<Eigen::Index>(i)] = rows[i].values[0];
    seq.y[static_cast<Eigen::Index>(i)] = rows[i].values[1];
  }
  if (train_length != 0 && (train_length < 1 || train_length >= static_cast<int>(rows.size()))) {
    throw DataError(fmt::format("{}: train length {} must lie in [1, {})", path.string(), train_length, rows.size()));
  }
  seq.train_length = train_length;
  return seq;
}

std::vector<std::pair<int, double>> load_predictions(const fs::path& path) {
  const auto rows = read_numeric_csv(path, 2);
  std::vector<std::pair<int, double>> out;
  for (const auto& row : rows) out.emplace_back(as_index(row.values[0], path, row.line, "time index"), row.values[1]);
  return out;
}

void write_frames(const fs::path& path, const FrameStack& stack) {
  auto out = open_out(path);
  out << "frame";
  for (int a = 0; a < stack.grid_w; ++a) out << ",p" << a;
  out << '\n';
  for (std::size_t f = 0; f < stack.frames.size(); ++f) {
    const auto& img = stack.frames[f].image;
    for (int b = 0; b < stack.grid_h; ++b) {
      out << f;
      for (int a = 0; a < stack.grid_w; ++a) out << ',' << format_real(img[static_cast<Eigen::Index>(b) * stack.grid_w + a]);
      out << '\n';
    }
  }
}

void write_truth(const fs::path& path, const FrameStack& stack) {
  auto out = open_out(path);
  out << "frame,x_nm,y_nm,intensity\n";
  for (std::size_t f = 0; f < stack.frames.size(); ++f) {
    if (!stack.frames[f].truth) continue;
    for (const auto& s : *stack.frames[f].truth) {
      out << f << ',' << format_real(s.x) << ',' << format_real(s.y) << ',' << format_real(s.weight) << '\n';
    }
  }
}

void write_ratings(const fs::path& path, const std::vector<Rating>& ratings) {
  auto out = open_out(path);
  out << "user,item,rating\n";
  for (const auto& r : ratings) out << r.user << ',' << r.item << ',' << format_real(r.rating) << '\n';
}

void write_io(const fs::path& path, const IOSequence& seq) {
  auto out = open_out(path);
  out << "u,y\n";
  for (Eigen::Index t = 0; t < seq.u.size(); ++t) out << format_real(seq.u[t]) << ',' << format_real(seq.y[t]) << '\n';
}

}  // namespace adcg::bench
