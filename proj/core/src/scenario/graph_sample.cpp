#include "gridflow/scenario/graph_sample.hpp"

#include <complex>

#include "gridflow/common/error.hpp"
#include "gridflow/pf/injections.hpp"

namespace gridflow::scenario {

grid::BusKind GraphSample::kind(std::size_t node) const {
    if (feature(node, kIsSlack) == 1.0) return grid::BusKind::Slack;
    if (feature(node, kIsPV) == 1.0) return grid::BusKind::PV;
    return grid::BusKind::PQ;
}

GraphSample build_graph_sample(grid::Network const& net, pf::PFSolution const& sol) {
    if (!sol.converged) {
        throw PreconditionError("cannot build a graph sample from a non-converged solution");
    }
    std::size_t const n = net.size();
    if (sol.state.size() != n) {
        throw ShapeError("solution has " + std::to_string(sol.state.size()) + " buses, network " + std::to_string(n));
    }
    auto const scheduled = pf::scheduled_injections(net);

    GraphSample s;
    s.num_nodes = n;
    s.node_features.assign(n * kFeatureCount, 0.0);
    s.targets.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto const& bus = net.buses[i];
        double* row = &s.node_features[i * kFeatureCount];
        switch (bus.kind) {
            case grid::BusKind::PQ:
                row[kP] = scheduled.p[i];
                row[kQ] = scheduled.q[i];
                row[kVInit] = 1.0;
                row[kThetaInit] = 0.0;
                row[kIsPQ] = 1.0;
                break;
            case grid::BusKind::PV:
                row[kP] = scheduled.p[i];
                row[kVInit] = bus.v_setpoint;
                row[kIsPV] = 1.0;
                break;
            case grid::BusKind::Slack:
                row[kVInit] = bus.v_setpoint;
                row[kThetaInit] = bus.theta_setpoint;
                row[kIsSlack] = 1.0;
                break;
        }
        s.targets[2 * i] = sol.state.v[i];
        s.targets[2 * i + 1] = sol.state.theta[i];
    }

    for (auto const& br : net.branches) {
        if (!br.in_service) {
            continue;
        }
        std::complex<double> const y = 1.0 / std::complex<double>(br.r, br.x);
        auto const from = static_cast<std::uint32_t>(br.from_bus);
        auto const to = static_cast<std::uint32_t>(br.to_bus);
        s.edges.push_back({from, to});
        s.edges.push_back({to, from});
        for (int dir = 0; dir < 2; ++dir) {
            s.edge_features.push_back(std::abs(y));
            s.edge_features.push_back(std::arg(y));
        }
    }
    return s;
}

}  // namespace gridflow::scenario
