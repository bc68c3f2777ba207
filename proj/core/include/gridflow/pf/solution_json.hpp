#pragma once

#include <nlohmann/json.hpp>

#include "gridflow/pf/newton_raphson.hpp"

namespace gridflow::pf {

// { "converged", "iterations", "max_mismatch", "diverged", "slack_p", "slack_q",
//   "v": [...], "theta": [...] }
nlohmann::json to_json(PFSolution const& sol);
PFSolution solution_from_json(nlohmann::json const& j);

}  // namespace gridflow::pf
