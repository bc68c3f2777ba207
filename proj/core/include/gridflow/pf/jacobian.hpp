#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridflow/grid/network.hpp"
#include "gridflow/grid/ybus.hpp"
#include "gridflow/pf/state.hpp"

namespace gridflow::pf {

// Square sparse Jacobian of the injections with respect to the unknowns, in
// coordinate form. Rows follow the mismatch ordering and columns the
// UnknownLayout ordering:
//   [ dP/dtheta  dP/d|V| ]
//   [ dQ/dtheta  dQ/d|V| ]
struct Jacobian {
    std::size_t dim = 0;
    std::vector<std::size_t> row;
    std::vector<std::size_t> col;
    std::vector<double> value;

    // Row-major dense copy, for tests and diagnostics.
    std::vector<double> dense() const;
};

Jacobian build_jacobian(grid::AdmittanceMatrix const& ybus, VoltageState const& state,
                        std::span<grid::BusKind const> kinds);

}  // namespace gridflow::pf
