#pragma once

#include <optional>

#include "gridflow/grid/network.hpp"
#include "gridflow/grid/ybus.hpp"
#include "gridflow/pf/state.hpp"

namespace gridflow::pf {

struct NrOptions {
    double tolerance = 1e-8;  // on max |mismatch|, p.u.
    int max_iterations = 50;
    std::optional<VoltageState> initial_state;  // flat start when empty
    // Any |V| leaving (v_floor, v_ceiling) aborts the solve as diverged.
    double v_floor = 0.2;
    double v_ceiling = 5.0;
};

struct PFSolution {
    VoltageState state;
    int iterations = 0;          // Newton updates applied
    double max_mismatch = 0.0;   // at the returned state, p.u.
    bool converged = false;
    bool diverged = false;       // stopped because |V| left the admissible band
    double slack_p = 0.0;        // slack-bus generation, p.u.
    double slack_q = 0.0;
};

// Full Newton-Raphson in polar coordinates with a sparse LU solve per
// iteration. PV reactive limits are not enforced.
//
// A non-converged result (iteration cap or divergence) is returned, not thrown.
// Throws PreconditionError if some bus is not connected to the slack bus and
// SolverError if the Jacobian is singular.
PFSolution nr_solve(grid::Network const& net, NrOptions const& options = {});

// Same, reusing a pre-built admittance matrix.
PFSolution nr_solve(grid::Network const& net, grid::AdmittanceMatrix const& ybus, NrOptions const& options = {});

}  // namespace gridflow::pf
