#pragma once

#include <vector>

#include "gridflow/grid/network.hpp"
#include "gridflow/grid/ybus.hpp"
#include "gridflow/pf/state.hpp"

namespace gridflow::pf {

// P_i = sum_j |V_i||V_j| (G_ij cos t_ij + B_ij sin t_ij)
// Q_i = sum_j |V_i||V_j| (G_ij sin t_ij - B_ij cos t_ij), over the sparse pattern.
InjectionVector compute_injections(grid::AdmittanceMatrix const& ybus, VoltageState const& state);

// Scheduled net injections (generation minus demand) per bus.
InjectionVector scheduled_injections(grid::Network const& net);

// [dP at non-slack buses ; dQ at PQ buses], both ascending by bus index,
// with dX = X_scheduled - X(state).
std::vector<double> compute_mismatch(grid::Network const& net, grid::AdmittanceMatrix const& ybus,
                                     VoltageState const& state);

}  // namespace gridflow::pf
