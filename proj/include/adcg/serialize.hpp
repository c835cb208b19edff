#pragma once

#include <nlohmann/json.hpp>

#include "adcg/measure.hpp"
#include "adcg/solver.hpp"

namespace adcg {

/// {"atoms": [{"w": ..., "theta": [...]}, ...]}
nlohmann::json to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SolveResult& result);

/// Shortest decimal text that round-trips a double; used for every number the
/// CLI writes so repeated runs are byte-identical.
std::string format_real(double x);

/// Serializes with numbers printed by format_real and two-space indentation.
std::string dump_json(const nlohmann::json& j);

}  // namespace adcg
