#pragma once

#include <cstdint>

namespace gridflow::scenario {

struct ScenarioConfig {
    double load_low = -0.4;  // bounds of the relative load change epsilon
    double load_high = 0.4;
    double topology_fraction = 0.05;
    std::int64_t samples = 12000;
    std::uint64_t seed = 0;
    double tap_step = 0.0125;
    int tap_max_steps = 2;
    // Converged solutions with any |V| outside (v_min, v_max) are discarded.
    double v_min = 0.8;
    double v_max = 1.2;
    // Abort when more than half the scenarios of any window are discarded.
    std::int64_t discard_window = 1000;

    bool operator==(ScenarioConfig const&) const = default;
};

// Throws ConfigError when an invariant is violated.
void validate(ScenarioConfig const& cfg);

}  // namespace gridflow::scenario
