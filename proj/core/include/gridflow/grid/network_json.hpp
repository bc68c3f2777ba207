#pragma once

#include <nlohmann/json.hpp>

#include "gridflow/grid/network.hpp"

namespace gridflow::grid {

// Canonical JSON form of a Network:
//   { "name", "base_mva",
//     "buses":      [{ "id", "kind": "slack|pv|pq", "p_demand", "q_demand",
//                      "v_setpoint", "theta_setpoint", "shunt_g", "shunt_b" }],
//     "branches":   [{ "from", "to", "r", "x", "b_charging", "tap", "shift", "in_service" }],
//     "generators": [{ "bus", "p_gen", "q_gen", "v_setpoint", "in_service" }] }
// Branch and generator bus references are internal 0-based indices. Values are
// per unit and radians; doubles are written in shortest round-trip form.
nlohmann::json to_json(Network const& net);
Network network_from_json(nlohmann::json const& j);

}  // namespace gridflow::grid
