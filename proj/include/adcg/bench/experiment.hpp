#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adcg/bench/io.hpp"
#include "adcg/solver.hpp"

namespace adcg::bench {

/// Configuration or input error; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string path = {})
      : std::runtime_error(message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum ExitCode : int { kSuccess = 0, kSolverWarning = 1, kIoError = 2 };

/// Solver section of a config plus the two data-dependent defaults.
struct SolverSettings {
  SolverConfig config;
  bool auto_tau = false;        ///< tau = 10 x single-atom least-squares weight
  bool auto_stagewise = false;  ///< threshold = 1e-4 x initial objective
};

SolverSettings parse_solver_settings(const nlohmann::json& j);

/// Resolves the data-dependent defaults for one observation and runs.
SolveResult solve_with_settings(const ForwardModel& model, const Vector& y, const SolverSettings& settings,
                                const RunHooks& hooks = {});

/// Number of workers: ADCG_WORKERS overrides the configured count.
int resolve_workers(int configured);

/// Runs fn(i) for i in [0, count) on `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Reads the config, runs the experiment, writes results into the output
/// directory.  Returns an ExitCode; errors are reported as JSON on `err`.
int run_experiment(const std::filesystem::path& config_path, std::ostream& log, std::ostream& err);

}  // namespace adcg::bench
