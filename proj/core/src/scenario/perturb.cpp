#include "gridflow/scenario/perturb.hpp"

#include <vector>

#include "gridflow/common/error.hpp"
#include "gridflow/grid/connectivity.hpp"

namespace gridflow::scenario {

bool is_load_bus(grid::Bus const& bus) { return bus.p_demand != 0.0 || bus.q_demand != 0.0; }

grid::Network perturb_loads(grid::Network net, Rng& rng, double low, double high) {
    for (auto& bus : net.buses) {
        if (!is_load_bus(bus)) {
            continue;
        }
        double const eps_p = rng.uniform(low, high);
        double const eps_q = rng.uniform(low, high);
        bus.p_demand *= 1.0 + eps_p;
        bus.q_demand *= 1.0 + eps_q;
    }
    return net;
}

namespace {

TopologyChange take_line_out(grid::Network& net, Rng& rng) {
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        if (net.branches[k].in_service) {
            candidates.push_back(k);
        }
    }
    while (!candidates.empty()) {
        auto const pick = static_cast<std::size_t>(rng.below(candidates.size()));
        std::size_t const k = candidates[pick];
        net.branches[k].in_service = false;
        if (grid::check_connectivity(net).connected()) {
            return {TopologyChange::Kind::Outage, k, net.branches[k].tap};
        }
        net.branches[k].in_service = true;
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    throw GenerationError("no single branch outage keeps the network connected");
}

}  // namespace

PerturbedNetwork sample_topology_perturbation(grid::Network net, Rng& rng, double tap_step, int tap_max_steps) {
    bool const outage = rng.uniform() < 0.5;
    if (!outage && tap_max_steps > 0) {
        std::vector<std::size_t> transformers;
        for (std::size_t k = 0; k < net.branches.size(); ++k) {
            if (net.branches[k].in_service && net.branches[k].tap != 1.0) {
                transformers.push_back(k);
            }
        }
        if (!transformers.empty()) {
            std::size_t const k = transformers[static_cast<std::size_t>(rng.below(transformers.size()))];
            auto const m = static_cast<std::uint64_t>(tap_max_steps);
            auto const draw = static_cast<int>(rng.below(2 * m));
            int const steps = draw < tap_max_steps ? draw - tap_max_steps : draw - tap_max_steps + 1;
            net.branches[k].tap += steps * tap_step;
            TopologyChange const change{TopologyChange::Kind::Tap, k, net.branches[k].tap};
            return {std::move(net), change};
        }
    }
    TopologyChange change = take_line_out(net, rng);
    return {std::move(net), change};
}

grid::Network apply_topology_change(grid::Network net, TopologyChange const& change) {
    if (change.kind == TopologyChange::Kind::None) {
        return net;
    }
    if (change.branch >= net.branches.size()) {
        throw ValidationError("topology change references branch " + std::to_string(change.branch) +
                              " of a " + std::to_string(net.branches.size()) + "-branch network");
    }
    if (change.kind == TopologyChange::Kind::Outage) {
        net.branches[change.branch].in_service = false;
    } else {
        net.branches[change.branch].tap = change.tap;
    }
    return net;
}

}  // namespace gridflow::scenario
