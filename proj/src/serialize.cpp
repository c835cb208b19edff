#include "adcg/serialize.hpp"

#include <fmt/format.h>

namespace adcg {

using nlohmann::json;

json to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) {
    atoms.push_back({{"w", a.weight}, {"theta", std::vector<double>(a.theta.data(), a.theta.data() + a.theta.size())}});
  }
  return json{{"atoms", std::move(atoms)}};
}

AtomicMeasure measure_from_json(const json& j) {
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    const auto theta = a.at("theta").get<std::vector<double>>();
    atoms.push_back({a.at("w").get<double>(), Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size()))});
  }
  return AtomicMeasure(std::move(atoms));
}

json to_json(const SolveResult& result) {
  return json{
      {"measure", to_json(result.measure)},
      {"objective_trace", result.objective_trace},
      {"gap_trace", result.gap_trace},
      {"support_trace", result.support_trace},
      {"lower_bound", result.lower_bound},
      {"termination", to_string(result.termination)},
      {"iterations", result.iterations},
      {"weight_solver_warning", result.weight_solver_warning},
  };
}

std::string format_real(double x) { return fmt::format("{}", x); }

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace adcg
