#pragma once

#include <cstddef>

#include "gridflow/common/rng.hpp"
#include "gridflow/grid/network.hpp"

namespace gridflow::scenario {

// A bus carries load when its base demand is non-zero (PV buses included).
bool is_load_bus(grid::Bus const& bus);

// Scales p and q demand of every load bus by (1 + eps) with eps ~ U[low, high),
// drawn independently in ascending bus order, P before Q.
grid::Network perturb_loads(grid::Network net, Rng& rng, double low, double high);

struct TopologyChange {
    enum class Kind { None, Outage, Tap };
    Kind kind = Kind::None;
    std::size_t branch = 0;
    double tap = 1.0;  // new ratio, for Kind::Tap

    bool operator==(TopologyChange const&) const = default;
};

struct PerturbedNetwork {
    grid::Network net;
    TopologyChange change;
};

// With equal probability either takes one in-service branch out of service
// (redrawing while the outage would island the network) or moves the ratio of
// one transformer by k * tap_step, k uniform in {-max_steps..-1, 1..max_steps}.
// Networks without transformers always take the outage path.
// Throws GenerationError when no single outage keeps the network connected.
PerturbedNetwork sample_topology_perturbation(grid::Network net, Rng& rng, double tap_step, int tap_max_steps);

// Re-applies a recorded change to its base network.
grid::Network apply_topology_change(grid::Network net, TopologyChange const& change);

}  // namespace gridflow::scenario
