#include "adcg/bench/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "adcg/bench/metrics.hpp"
#include "adcg/bench/synthetic.hpp"
#include "adcg/models/lti.hpp"
#include "adcg/models/matcomp.hpp"
#include "adcg/models/superres.hpp"
#include "adcg/serialize.hpp"

namespace adcg::bench {

namespace fs = std::filesystem;
using nlohmann::json;

SolverSettings parse_solver_settings(const json& j) {
  SolverSettings s;
  auto& c = s.config;
  if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
  if (j.contains("tau")) {
    const auto& tau = j.at("tau");
    if (tau.is_string()) {
      if (tau.get<std::string>() != "auto") throw ConfigError("solver.tau must be a number or \"auto\"");
      s.auto_tau = true;
    } else {
      c.tau = tau.get<double>();
    }
  } else {
    s.auto_tau = true;
  }
  if (j.contains("max_outer_iters")) c.max_outer_iters = j.at("max_outer_iters").get<int>();
  if (j.contains("gap_tolerance")) c.gap_tolerance = j.at("gap_tolerance").get<double>();
  if (j.contains("max_inner_passes")) c.max_inner_passes = j.at("max_inner_passes").get<int>();
  if (j.contains("local_descent_steps")) c.local_descent_steps = j.at("local_descent_steps").get<int>();
  if (j.contains("stagewise_threshold") && !j.at("stagewise_threshold").is_null()) {
    const auto& t = j.at("stagewise_threshold");
    if (t.is_string()) {
      if (t.get<std::string>() != "auto") throw ConfigError("solver.stagewise_threshold must be a number, \"auto\" or null");
      s.auto_stagewise = true;
    } else {
      c.stagewise_threshold = t.get<double>();
    }
  }
  if (!s.auto_tau) c.validate();
  return s;
}

SolveResult solve_with_settings(const ForwardModel& model, const Vector& y, const SolverSettings& settings,
                                const RunHooks& hooks) {
  SolverConfig config = settings.config;
  if (settings.auto_tau) {
    // Ten times the least-squares weight of the best single atom.
    const Vector a = model.psi(model.lmo(-y));
    const double norm2 = a.squaredNorm();
    const double w = norm2 > 0.0 ? std::max(0.0, a.dot(y) / norm2) : 0.0;
    config.tau = w > 0.0 ? 10.0 * w : 1.0;
  }
  const SquaredLoss loss;
  if (settings.auto_stagewise) config.stagewise_threshold = 1e-4 * loss.value(-y);
  return run(model, y, loss, config, hooks);
}

int resolve_workers(int configured) {
  if (const char* env = std::getenv("ADCG_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1, configured);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const auto n = static_cast<std::size_t>(std::max(1, workers));
  if (n == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(n, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

struct Context {
  json config;
  fs::path base_dir;
  fs::path output_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  SolverSettings solver;
};

fs::path input_path(const Context& ctx, const json& section, const char* key) {
  if (!section.contains(key)) throw ConfigError(fmt::format("data.{} is required", key));
  fs::path p = section.at(key).get<std::string>();
  if (p.is_relative()) p = ctx.base_dir / p;
  if (!fs::exists(p)) throw ConfigError(fmt::format("input file not found: {}", p.string()), p.string());
  return p;
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()), path.string());
  out << text;
}

std::string trace_rows(const SolveResult& r, const std::string& prefix) {
  std::string out;
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
    out += fmt::format("{}{},{},{},{}\n", prefix, i, format_real(r.objective_trace[i]), format_real(r.gap_trace[i]),
                       r.support_trace[i]);
  }
  return out;
}

json run_summary(const SolveResult& r, double tau) {
  return json{{"tau", tau},
              {"termination", to_string(r.termination)},
              {"iterations", r.iterations},
              {"final_objective", r.objective_trace.back()},
              {"final_gap", r.gap_trace.back()},
              {"lower_bound", r.lower_bound},
              {"support", r.measure.size()},
              {"weight_solver_warning", r.weight_solver_warning}};
}

// Resolved tau is reported in the summary; recompute it the way solve_with_settings does.
double effective_tau(const ForwardModel& model, const Vector& y, const SolverSettings& s) {
  if (!s.auto_tau) return s.config.tau;
  const Vector a = model.psi(model.lmo(-y));
  const double norm2 = a.squaredNorm();
  const double w = norm2 > 0.0 ? std::max(0.0, a.dot(y) / norm2) : 0.0;
  return w > 0.0 ? 10.0 * w : 1.0;
}

int run_superres(const Context& ctx, std::ostream& log) {
  const json data = value_or(ctx.config, "data", json::object());
  const json model_cfg = value_or(ctx.config, "model", json::object());
  FrameStack stack;
  double pixel_size = value_or(model_cfg, "pixel_size", 100.0);
  if (data.contains("synthetic")) {
    const auto& syn = data.at("synthetic");
    TwoSourceOptions o;
    o.grid = value_or(syn, "grid", o.grid);
    o.pixel_size = pixel_size;
    o.sigma_px = value_or(model_cfg, "sigma", o.sigma_px * pixel_size) / pixel_size;
    o.separation_px = value_or(syn, "separation_px", o.separation_px);
    o.snr_db = value_or(syn, "snr_db", o.snr_db);
    o.frames = value_or(syn, "frames", o.frames);
    o.intensity = value_or(syn, "intensity", o.intensity);
    stack = generate_two_source(o, value_or<std::uint64_t>(syn, "seed", ctx.seed));
  } else {
    std::optional<fs::path> truth;
    if (data.contains("truth")) truth = input_path(ctx, data, "truth");
    stack = load_frames(input_path(ctx, data, "frames"), truth);
  }
  if (model_cfg.contains("grid_w") && model_cfg.at("grid_w").get<int>() != stack.grid_w) {
    throw ConfigError(fmt::format("model.grid_w = {} but frames have width {}", model_cfg.at("grid_w").get<int>(), stack.grid_w));
  }
  if (model_cfg.contains("grid_h") && model_cfg.at("grid_h").get<int>() != stack.grid_h) {
    throw ConfigError(fmt::format("model.grid_h = {} but frames have height {}", model_cfg.at("grid_h").get<int>(), stack.grid_h));
  }
  models::SuperresParams params;
  params.grid_w = stack.grid_w;
  params.grid_h = stack.grid_h;
  params.pixel_size = pixel_size;
  params.sigma = value_or(model_cfg, "sigma", pixel_size);
  const models::SuperresModel model(params);

  const std::size_t n = stack.frames.size();
  std::vector<SolveResult> results(n);
  std::vector<double> taus(n);
  parallel_for(n, ctx.workers, [&](std::size_t f) {
    const Vector& y = stack.frames[f].image;
    taus[f] = effective_tau(model, y, ctx.solver);
    results[f] = solve_with_settings(model, y, ctx.solver);
  });
  log << fmt::format("solved {} frames\n", n);

  fs::create_directories(ctx.output_dir / "runs");
  std::string estimates = "frame,x_nm,y_nm,weight\n";
  std::string traces = "frame,iteration,objective,gap,support\n";
  json runs = json::array();
  bool warning = false;
  for (std::size_t f = 0; f < n; ++f) {
    write_text(ctx.output_dir / "runs" / fmt::format("frame_{:04d}.json", f), dump_json(to_json(results[f])));
    for (const auto& a : results[f].measure.atoms()) {
      estimates += fmt::format("{},{},{},{}\n", f, format_real(a.theta[0]), format_real(a.theta[1]), format_real(a.weight));
    }
    traces += trace_rows(results[f], fmt::format("{},", f));
    runs.push_back(run_summary(results[f], taus[f]));
    warning = warning || results[f].weight_solver_warning;
  }
  write_text(ctx.output_dir / "estimates.csv", estimates);
  write_text(ctx.output_dir / "traces.csv", traces);

  json summary{{"problem", "superres"}, {"variant", to_string(ctx.solver.config.variant)}, {"frames", n}, {"runs", runs}};
  const bool have_truth = n > 0 && std::all_of(stack.frames.begin(), stack.frames.end(), [](const Frame& fr) { return fr.truth.has_value(); });
  if (have_truth) {
    std::vector<double> radii;
    const json metrics_cfg = value_or(ctx.config, "metrics", json::object());
    if (metrics_cfg.contains("radii_nm")) {
      radii = metrics_cfg.at("radii_nm").get<std::vector<double>>();
    } else {
      for (int k = 1; k <= 10; ++k) radii.push_back(k * pixel_size / 10.0);
    }
    std::string metrics = "radius_nm,precision,recall,f1,mean_f1\n";
    json table = json::array();
    for (double radius : radii) {
      std::size_t matches = 0, n_est = 0, n_truth = 0;
      double f1_sum = 0.0;
      for (std::size_t f = 0; f < n; ++f) {
        std::vector<Source> est;
        for (const auto& a : results[f].measure.atoms()) est.push_back({a.theta[0], a.theta[1], a.weight});
        const auto& truth = *stack.frames[f].truth;
        const MatchScore s = match_sources(est, truth, radius);
        matches += s.matches;
        n_est += est.size();
        n_truth += truth.size();
        f1_sum += s.f1;
      }
      const double precision = n_est ? static_cast<double>(matches) / static_cast<double>(n_est) : 0.0;
      const double recall = n_truth ? static_cast<double>(matches) / static_cast<double>(n_truth) : 0.0;
      const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
      const double mean_f1 = n ? f1_sum / static_cast<double>(n) : 0.0;
      metrics += fmt::format("{},{},{},{},{}\n", format_real(radius), format_real(precision), format_real(recall),
                             format_real(f1), format_real(mean_f1));
      table.push_back({{"radius_nm", radius}, {"precision", precision}, {"recall", recall}, {"f1", f1}, {"mean_f1", mean_f1}});
    }
    write_text(ctx.output_dir / "metrics.csv", metrics);
    summary["metrics"] = table;
  }
  write_text(ctx.output_dir / "summary.json", dump_json(summary));
  return warning ? kSolverWarning : kSuccess;
}

int run_matcomp(const Context& ctx, std::ostream& log) {
  const json data = value_or(ctx.config, "data", json::object());
  const json model_cfg = value_or(ctx.config, "model", json::object());
  RatingsData ratings;
  if (data.contains("synthetic")) {
    const auto& syn = data.at("synthetic");
    LowRankOptions o;
    o.rows = value_or(syn, "rows", o.rows);
    o.cols = value_or(syn, "cols", o.cols);
    o.rank = value_or(syn, "rank", o.rank);
    o.observed_fraction = value_or(syn, "observed_fraction", o.observed_fraction);
    ratings = generate_low_rank(o, value_or<std::uint64_t>(syn, "seed", ctx.seed)).ratings;
  } else {
    if (!model_cfg.contains("rows") || !model_cfg.contains("cols")) throw ConfigError("model.rows and model.cols are required");
    const int rows = model_cfg.at("rows").get<int>();
    const int cols = model_cfg.at("cols").get<int>();
    ratings = make_ratings_data(load_ratings(input_path(ctx, data, "train"), rows, cols),
                                load_ratings(input_path(ctx, data, "test"), rows, cols), rows, cols);
  }
  if (ratings.train.empty()) throw ConfigError("training ratings are empty");

  std::vector<models::Entry> omega;
  Vector y(static_cast<Eigen::Index>(ratings.train.size()));
  for (std::size_t k = 0; k < ratings.train.size(); ++k) {
    omega.push_back({ratings.train[k].user, ratings.train[k].item});
    y[static_cast<Eigen::Index>(k)] = ratings.train[k].rating - ratings.train_mean;
  }
  models::MatCompParams params;
  params.seed = ctx.seed;
  const models::MatCompModel model(ratings.rows, ratings.cols, std::move(omega), params);

  std::string metrics = "iteration,rmse\n";
  RunHooks hooks;
  hooks.on_iterate = [&](int i, const AtomicMeasure& mu) {
    metrics += fmt::format("{},{}\n", i, format_real(matcomp_rmse(mu, ratings.rows, ratings.test, ratings.train_mean)));
  };
  const double tau = effective_tau(model, y, ctx.solver);
  const SolveResult result = solve_with_settings(model, y, ctx.solver, hooks);
  const double rmse = matcomp_rmse(result.measure, ratings.rows, ratings.test, ratings.train_mean);
  log << fmt::format("matrix completion: {} iterations, test RMSE {}\n", result.iterations, format_real(rmse));

  fs::create_directories(ctx.output_dir);
  write_text(ctx.output_dir / "run.json", dump_json(to_json(result)));
  write_text(ctx.output_dir / "model.json",
             dump_json(json{{"rows", ratings.rows}, {"cols", ratings.cols}, {"train_mean", ratings.train_mean},
                            {"measure", to_json(result.measure)}}));
  write_text(ctx.output_dir / "traces.csv", "iteration,objective,gap,support\n" + trace_rows(result, ""));
  write_text(ctx.output_dir / "metrics.csv", metrics);
  json summary{{"problem", "matcomp"}, {"variant", to_string(ctx.solver.config.variant)},
               {"run", run_summary(result, tau)}, {"test_rmse", rmse}, {"train_mean", ratings.train_mean}};
  write_text(ctx.output_dir / "summary.json", dump_json(summary));
  return result.weight_solver_warning ? kSolverWarning : kSuccess;
}

int run_lti(const Context& ctx, std::ostream& log) {
  const json data = value_or(ctx.config, "data", json::object());
  const json model_cfg = value_or(ctx.config, "model", json::object());
  IOSequence seq;
  if (data.contains("synthetic")) {
    const auto& syn = data.at("synthetic");
    LtiOptions o;
    o.horizon = value_or(syn, "horizon", o.horizon);
    o.train_length = value_or(syn, "train_length", o.train_length);
    seq = generate_lti(o, value_or<std::uint64_t>(syn, "seed", ctx.seed)).sequence;
  } else {
    seq = load_io(input_path(ctx, data, "io"), value_or(data, "train_length", 0));
  }
  if (seq.train_length < 1 || seq.train_length >= seq.u.size()) throw ConfigError("data.train_length must lie in [1, T)");

  models::LtiParams params;
  params.r_grid = value_or(model_cfg, "r_grid", params.r_grid);
  params.alpha_grid = value_or(model_cfg, "alpha_grid", params.alpha_grid);
  const models::LtiModel train_model(seq.u.head(seq.train_length), params);
  const models::LtiModel full_model(seq.u, params);
  const Vector y_train = seq.y.head(seq.train_length);
  const Eigen::Index holdout = seq.u.size() - seq.train_length;
  const Vector y_test = seq.y.tail(holdout);

  std::string metrics = "iteration,score\n";
  RunHooks hooks;
  hooks.on_iterate = [&](int i, const AtomicMeasure& mu) {
    const Vector pred = apply_forward(full_model, mu).tail(holdout);
    metrics += fmt::format("{},{}\n", i, format_real(sysid_score(pred, y_test)));
  };
  const double tau = effective_tau(train_model, y_train, ctx.solver);
  const SolveResult result = solve_with_settings(train_model, y_train, ctx.solver, hooks);
  const Vector pred = apply_forward(full_model, result.measure).tail(holdout);
  const double score = sysid_score(pred, y_test);
  log << fmt::format("system identification: {} iterations, holdout score {}\n", result.iterations, format_real(score));

  fs::create_directories(ctx.output_dir);
  std::string predictions = "t,y_pred\n";
  for (Eigen::Index t = 0; t < holdout; ++t) predictions += fmt::format("{},{}\n", seq.train_length + t, format_real(pred[t]));
  write_text(ctx.output_dir / "run.json", dump_json(to_json(result)));
  write_text(ctx.output_dir / "predictions.csv", predictions);
  write_text(ctx.output_dir / "traces.csv", "iteration,objective,gap,support\n" + trace_rows(result, ""));
  write_text(ctx.output_dir / "metrics.csv", metrics);
  json summary{{"problem", "lti"}, {"variant", to_string(ctx.solver.config.variant)},
               {"run", run_summary(result, tau)}, {"holdout_score", score}};
  write_text(ctx.output_dir / "summary.json", dump_json(summary));
  return result.weight_solver_warning ? kSolverWarning : kSuccess;
}

void report(std::ostream& err, const std::string& kind, const std::string& message, const std::string& path = {}) {
  json j{{"error", kind}, {"message", message}};
  if (!path.empty()) j["path"] = path;
  err << j.dump() << '\n';
}

}  // namespace

int run_experiment(const fs::path& config_path, std::ostream& log, std::ostream& err) {
  try {
    if (!fs::exists(config_path)) {
      throw ConfigError(fmt::format("config file not found: {}", config_path.string()), config_path.string());
    }
    std::ifstream in(config_path);
    Context ctx;
    try {
      ctx.config = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}: invalid JSON: {}", config_path.string(), e.what()), config_path.string());
    }
    ctx.base_dir = fs::absolute(config_path).parent_path();
    ctx.output_dir = value_or<std::string>(ctx.config, "output_dir", "out");
    if (ctx.output_dir.is_relative()) ctx.output_dir = ctx.base_dir / ctx.output_dir;
    ctx.seed = value_or<std::uint64_t>(ctx.config, "seed", 0);
    ctx.workers = resolve_workers(value_or(ctx.config, "workers", 1));
    const std::string problem = value_or<std::string>(ctx.config, "problem", "");
    json solver_cfg = value_or(ctx.config, "solver", json::object());
    if (problem == "superres" && !solver_cfg.contains("stagewise_threshold")) solver_cfg["stagewise_threshold"] = "auto";
    try {
      ctx.solver = parse_solver_settings(solver_cfg);
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("solver section: {}", e.what()));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    if (problem == "superres") return run_superres(ctx, log);
    if (problem == "matcomp") return run_matcomp(ctx, log);
    if (problem == "lti") return run_lti(ctx, log);
    throw ConfigError(fmt::format("unknown problem '{}' (expected superres, matcomp or lti)", problem));
  } catch (const ConfigError& e) {
    report(err, "config", e.what(), e.path());
  } catch (const DataError& e) {
    report(err, "data", e.what());
  } catch (const json::exception& e) {
    report(err, "config", e.what());
  } catch (const fs::filesystem_error& e) {
    report(err, "io", e.what(), e.path1().string());
  } catch (const std::exception& e) {
    report(err, "solver", e.what());
  }
  return kIoError;
}

}  // namespace adcg::bench
