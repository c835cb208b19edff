// Command-line front end: solve an experiment, generate synthetic inputs,
// score estimates against ground truth.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "adcg/bench/experiment.hpp"
#include "adcg/bench/synthetic.hpp"
#include "adcg/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adcg;
using namespace adcg::bench;

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()), path.string());
  out << dump_json(j);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("input file not found: {}", path.string()), path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()), path.string());
  }
}

void generate_dataset(const std::string& kind, const fs::path& out, std::uint64_t seed) {
  fs::create_directories(out);
  json config{{"seed", seed}, {"workers", 1}, {"output_dir", "results"}};
  if (kind == "twosource") {
    const TwoSourceOptions o;
    const FrameStack stack = generate_two_source(o, seed);
    write_frames(out / "frames.csv", stack);
    write_truth(out / "truth.csv", stack);
    config["problem"] = "superres";
    config["model"] = {{"pixel_size", o.pixel_size}, {"sigma", o.sigma_px * o.pixel_size}};
    config["solver"] = {{"variant", "ADCG"}, {"tau", "auto"}, {"max_outer_iters", 10}, {"stagewise_threshold", "auto"}};
    config["data"] = {{"frames", "frames.csv"}, {"truth", "truth.csv"}};
  } else if (kind == "lowrank") {
    const LowRankOptions o;
    const LowRankData data = generate_low_rank(o, seed);
    write_ratings(out / "train.csv", data.ratings.train);
    write_ratings(out / "test.csv", data.ratings.test);
    config["problem"] = "matcomp";
    config["model"] = {{"rows", o.rows}, {"cols", o.cols}};
    config["solver"] = {{"variant", "ADCG"}, {"tau", data.centered_nuclear_norm}, {"max_outer_iters", 30}};
    config["data"] = {{"train", "train.csv"}, {"test", "test.csv"}};
  } else if (kind == "lti") {
    const LtiOptions o;
    const LtiData data = generate_lti(o, seed);
    write_io(out / "io.csv", data.sequence);
    write_json(out / "truth.json", to_json(data.truth));
    config["problem"] = "lti";
    config["solver"] = {{"variant", "ADCG"}, {"tau", 1.2 * data.truth.total_mass()}, {"max_outer_iters", 30}};
    config["data"] = {{"io", "io.csv"}, {"train_length", o.train_length}};
  } else {
    throw ConfigError(fmt::format("unknown kind '{}'", kind));
  }
  write_json(out / "config.json", config);
}

json score_files(const std::string& kind, const fs::path& est, const fs::path& truth, double radius) {
  for (const auto& p : {est, truth}) {
    if (!fs::exists(p)) throw ConfigError(fmt::format("input file not found: {}", p.string()), p.string());
  }
  if (kind == "f1") {
    const auto estimates = load_sources(est);
    const auto sources = load_sources(truth);
    std::size_t matches = 0, n_est = 0, n_truth = 0;
    for (std::size_t f = 0; f < std::max(estimates.size(), sources.size()); ++f) {
      const std::vector<Source> none;
      const auto& e = f < estimates.size() ? estimates[f] : none;
      const auto& t = f < sources.size() ? sources[f] : none;
      matches += match_sources(e, t, radius).matches;
      n_est += e.size();
      n_truth += t.size();
    }
    const double precision = n_est ? static_cast<double>(matches) / static_cast<double>(n_est) : 0.0;
    const double recall = n_truth ? static_cast<double>(matches) / static_cast<double>(n_truth) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    return {{"radius_nm", radius}, {"precision", precision}, {"recall", recall}, {"f1", f1}};
  }
  if (kind == "rmse") {
    const json model = read_json(est);
    const int rows = model.at("rows").get<int>();
    const int cols = model.at("cols").get<int>();
    const AtomicMeasure mu = measure_from_json(model.at("measure"));
    const auto test = load_ratings(truth, rows, cols);
    return {{"rmse", matcomp_rmse(mu, rows, test, model.at("train_mean").get<double>())}};
  }
  if (kind == "sysid") {
    const auto predictions = load_predictions(est);
    const IOSequence seq = load_io(truth, 0);
    Vector pred(static_cast<Eigen::Index>(predictions.size()));
    Vector test(pred.size());
    for (std::size_t k = 0; k < predictions.size(); ++k) {
      const auto [t, value] = predictions[k];
      if (t < 0 || t >= seq.y.size()) {
        throw DataError(fmt::format("{}: time index {} outside the sequence", est.string(), t));
      }
      pred[static_cast<Eigen::Index>(k)] = value;
      test[static_cast<Eigen::Index>(k)] = seq.y[t];
    }
    return {{"score", sysid_score(pred, test)}};
  }
  throw ConfigError(fmt::format("unknown kind '{}'", kind));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional gradient solvers for sparse inverse problems over measures"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve_cmd = app.add_subcommand("solve", "Run the experiment described by a config file");
  solve_cmd->add_option("--config", config_path, "Path to the JSON config")->required();

  std::string gen_kind, gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic dataset and a matching config");
  gen_cmd->add_option("--kind", gen_kind)->required()->check(CLI::IsMember({"twosource", "lowrank", "lti"}));
  gen_cmd->add_option("--out", gen_out)->required();
  gen_cmd->add_option("--seed", gen_seed)->required();

  std::string score_kind, est_path, truth_path;
  double radius = 50.0;
  auto* score_cmd = app.add_subcommand("score", "Score estimates against ground truth");
  score_cmd->add_option("--kind", score_kind)->required()->check(CLI::IsMember({"f1", "rmse", "sysid"}));
  score_cmd->add_option("--est", est_path)->required();
  score_cmd->add_option("--truth", truth_path)->required();
  score_cmd->add_option("--radius", radius, "Matching radius in nm (f1 only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kIoError;
  }

  if (*solve_cmd) return run_experiment(config_path, std::cout, std::cerr);

  try {
    if (*gen_cmd) {
      generate_dataset(gen_kind, gen_out, gen_seed);
    } else {
      std::cout << score_files(score_kind, est_path, truth_path, radius).dump() << '\n';
    }
    return kSuccess;
  } catch (const ConfigError& e) {
    json j{{"error", "config"}, {"message", e.what()}};
    if (!e.path().empty()) j["path"] = e.path();
    std::cerr << j.dump() << '\n';
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "data"}, {"message", e.what()}}.dump() << '\n';
  }
  return kIoError;
}
