#include "gridflow/pf/injections.hpp"

#include <cmath>

#include "gridflow/common/error.hpp"

namespace gridflow::pf {

UnknownLayout unknown_layout(std::span<grid::BusKind const> kinds) {
    UnknownLayout layout;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i] != grid::BusKind::Slack) {
            layout.theta_buses.push_back(i);
        }
    }
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i] == grid::BusKind::PQ) {
            layout.v_buses.push_back(i);
        }
    }
    return layout;
}

std::vector<grid::BusKind> bus_kinds(grid::Network const& net) {
    std::vector<grid::BusKind> kinds;
    kinds.reserve(net.size());
    for (auto const& bus : net.buses) {
        kinds.push_back(bus.kind);
    }
    return kinds;
}

VoltageState flat_start(grid::Network const& net) {
    VoltageState s{std::vector<double>(net.size(), 1.0), std::vector<double>(net.size(), 0.0)};
    for (std::size_t i = 0; i < net.size(); ++i) {
        auto const& bus = net.buses[i];
        if (bus.kind != grid::BusKind::PQ) {
            s.v[i] = bus.v_setpoint;
        }
        if (bus.kind == grid::BusKind::Slack) {
            s.theta[i] = bus.theta_setpoint;
        }
    }
    return s;
}

InjectionVector compute_injections(grid::AdmittanceMatrix const& ybus, VoltageState const& state) {
    if (state.v.size() != ybus.n || state.theta.size() != ybus.n) {
        throw ShapeError("voltage state has " + std::to_string(state.v.size()) + " buses, admittance matrix " +
                         std::to_string(ybus.n));
    }
    InjectionVector s{std::vector<double>(ybus.n, 0.0), std::vector<double>(ybus.n, 0.0)};
    for (std::size_t i = 0; i < ybus.n; ++i) {
        double p = 0.0;
        double q = 0.0;
        for (std::size_t k = ybus.row_start[i]; k < ybus.row_start[i + 1]; ++k) {
            std::size_t const j = ybus.col[k];
            double const t = state.theta[i] - state.theta[j];
            double const c = std::cos(t);
            double const sn = std::sin(t);
            double const vv = state.v[i] * state.v[j];
            p += vv * (ybus.g[k] * c + ybus.b[k] * sn);
            q += vv * (ybus.g[k] * sn - ybus.b[k] * c);
        }
        s.p[i] = p;
        s.q[i] = q;
    }
    return s;
}

InjectionVector scheduled_injections(grid::Network const& net) {
    InjectionVector s{net.scheduled_p_gen(), net.scheduled_q_gen()};
    for (std::size_t i = 0; i < net.size(); ++i) {
        s.p[i] -= net.buses[i].p_demand;
        s.q[i] -= net.buses[i].q_demand;
    }
    return s;
}

std::vector<double> compute_mismatch(grid::Network const& net, grid::AdmittanceMatrix const& ybus,
                                     VoltageState const& state) {
    auto const kinds = bus_kinds(net);
    auto const layout = unknown_layout(kinds);
    auto const spec = scheduled_injections(net);
    auto const calc = compute_injections(ybus, state);
    std::vector<double> mismatch;
    mismatch.reserve(layout.size());
    for (auto i : layout.theta_buses) {
        mismatch.push_back(spec.p[i] - calc.p[i]);
    }
    for (auto i : layout.v_buses) {
        mismatch.push_back(spec.q[i] - calc.q[i]);
    }
    return mismatch;
}

}  // namespace gridflow::pf
