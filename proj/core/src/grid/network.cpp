#include "gridflow/grid/network.hpp"

#include <unordered_set>

#include "gridflow/common/error.hpp"

namespace gridflow::grid {

char const* to_string(BusKind kind) {
    switch (kind) {
        case BusKind::Slack: return "slack";
        case BusKind::PV: return "pv";
        case BusKind::PQ: return "pq";
    }
    return "?";
}

std::size_t Network::slack_index() const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].kind == BusKind::Slack) {
            return i;
        }
    }
    throw ValidationError("network has no slack bus");
}

std::vector<double> Network::scheduled_p_gen() const {
    std::vector<double> p(buses.size(), 0.0);
    for (auto const& g : generators) {
        if (g.in_service) {
            p[g.bus] += g.p_gen;
        }
    }
    return p;
}

std::vector<double> Network::scheduled_q_gen() const {
    std::vector<double> q(buses.size(), 0.0);
    for (auto const& g : generators) {
        if (g.in_service) {
            q[g.bus] += g.q_gen;
        }
    }
    return q;
}

void validate(Network const& net) {
    if (!(net.base_mva > 0.0)) {
        throw ValidationError("base_mva must be positive");
    }
    std::size_t slack_count = 0;
    std::unordered_set<int> ids;
    for (auto const& bus : net.buses) {
        if (!ids.insert(bus.original_id).second) {
            throw ValidationError("duplicate bus id " + std::to_string(bus.original_id));
        }
        if (bus.kind == BusKind::Slack) {
            ++slack_count;
        }
        if (bus.kind != BusKind::PQ && !(bus.v_setpoint > 0.0)) {
            throw ValidationError("bus " + std::to_string(bus.original_id) +
                                  " has a non-positive voltage set-point");
        }
    }
    if (slack_count == 0) {
        throw ValidationError("network has no slack bus");
    }
    if (slack_count > 1) {
        throw ValidationError("network has " + std::to_string(slack_count) + " slack buses");
    }
    for (std::size_t k = 0; k < net.branches.size(); ++k) {
        auto const& br = net.branches[k];
        if (br.from_bus >= net.size() || br.to_bus >= net.size()) {
            throw ValidationError("branch " + std::to_string(k) + " references a missing bus");
        }
        if (br.r * br.r + br.x * br.x <= 0.0) {
            throw ValidationError("branch " + std::to_string(k) + " has zero series impedance");
        }
        if (!(br.tap > 0.0)) {
            throw ValidationError("branch " + std::to_string(k) + " has a non-positive tap ratio");
        }
    }
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
        if (net.generators[k].bus >= net.size()) {
            throw ValidationError("generator " + std::to_string(k) + " references a missing bus");
        }
    }
}

}  // namespace gridflow::grid
