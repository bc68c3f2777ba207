#include "gridflow/pf/jacobian.hpp"

#include <cmath>
#include <limits>

#include "gridflow/pf/injections.hpp"

namespace gridflow::pf {

std::vector<double> Jacobian::dense() const {
    std::vector<double> out(dim * dim, 0.0);
    for (std::size_t k = 0; k < value.size(); ++k) {
        out[row[k] * dim + col[k]] += value[k];
    }
    return out;
}

Jacobian build_jacobian(grid::AdmittanceMatrix const& ybus, VoltageState const& state,
                        std::span<grid::BusKind const> kinds) {
    std::size_t const n = ybus.n;
    auto const layout = unknown_layout(kinds);
    auto const injections = compute_injections(ybus, state);

    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> theta_pos(n, none);
    std::vector<std::size_t> v_pos(n, none);
    for (std::size_t k = 0; k < layout.theta_buses.size(); ++k) {
        theta_pos[layout.theta_buses[k]] = k;
    }
    for (std::size_t k = 0; k < layout.v_buses.size(); ++k) {
        v_pos[layout.v_buses[k]] = layout.theta_buses.size() + k;
    }

    Jacobian jac;
    jac.dim = layout.size();
    auto put = [&](std::size_t r, std::size_t c, double value) {
        if (r != none && c != none) {
            jac.row.push_back(r);
            jac.col.push_back(c);
            jac.value.push_back(value);
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t const p_row = theta_pos[i];  // dP_i row exists for non-slack buses
        std::size_t const q_row = v_pos[i];      // dQ_i row exists for PQ buses
        if (p_row == none && q_row == none) {
            continue;
        }
        double const vi = state.v[i];
        for (std::size_t k = ybus.row_start[i]; k < ybus.row_start[i + 1]; ++k) {
            std::size_t const j = ybus.col[k];
            double const g = ybus.g[k];
            double const b = ybus.b[k];
            if (j == i) {
                double const p = injections.p[i];
                double const q = injections.q[i];
                put(p_row, theta_pos[i], -q - b * vi * vi);
                put(p_row, v_pos[i], p / vi + g * vi);
                put(q_row, theta_pos[i], p - g * vi * vi);
                put(q_row, v_pos[i], q / vi - b * vi);
                continue;
            }
            double const vj = state.v[j];
            double const t = state.theta[i] - state.theta[j];
            double const c = std::cos(t);
            double const s = std::sin(t);
            double const gs_bc = g * s - b * c;
            double const gc_bs = g * c + b * s;
            put(p_row, theta_pos[j], vi * vj * gs_bc);
            put(p_row, v_pos[j], vi * gc_bs);
            put(q_row, theta_pos[j], -vi * vj * gc_bs);
            put(q_row, v_pos[j], vi * gs_bc);
        }
    }
    return jac;
}

}  // namespace gridflow::pf
