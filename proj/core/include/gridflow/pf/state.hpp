#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridflow/grid/network.hpp"

namespace gridflow::pf {

struct VoltageState {
    std::vector<double> v;      // magnitudes, p.u.
    std::vector<double> theta;  // angles, rad

    std::size_t size() const { return v.size(); }
    bool operator==(VoltageState const&) const = default;
};

// Net injections P + jQ per bus, p.u.
struct InjectionVector {
    std::vector<double> p;
    std::vector<double> q;
};

// Unknowns of the power-flow problem: angles at all non-slack buses, then
// magnitudes at PQ buses, each in ascending bus order.
struct UnknownLayout {
    std::vector<std::size_t> theta_buses;
    std::vector<std::size_t> v_buses;

    std::size_t size() const { return theta_buses.size() + v_buses.size(); }
};

UnknownLayout unknown_layout(std::span<grid::BusKind const> kinds);
std::vector<grid::BusKind> bus_kinds(grid::Network const& net);

// |V| = 1, theta = 0 at PQ buses; set-point magnitude at PV and slack buses;
// set-point angle at the slack bus.
VoltageState flat_start(grid::Network const& net);

}  // namespace gridflow::pf
