#include "gridflow/pf/newton_raphson.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "gridflow/common/error.hpp"
#include "gridflow/grid/connectivity.hpp"
#include "gridflow/pf/injections.hpp"
#include "gridflow/pf/jacobian.hpp"

namespace gridflow::pf {

namespace {

double inf_norm(std::vector<double> const& x) {
    double m = 0.0;
    for (double v : x) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

bool within_band(VoltageState const& s, NrOptions const& opt) {
    return std::all_of(s.v.begin(), s.v.end(), [&](double v) { return v > opt.v_floor && v < opt.v_ceiling; });
}

}  // namespace

PFSolution nr_solve(grid::Network const& net, NrOptions const& options) {
    return nr_solve(net, grid::build_ybus(net), options);
}

PFSolution nr_solve(grid::Network const& net, grid::AdmittanceMatrix const& ybus, NrOptions const& options) {
    auto const components = grid::check_connectivity(net);
    if (!components.slack_component) {
        throw PreconditionError("network has no slack bus");
    }
    if (components.groups.size() != 1) {
        throw PreconditionError("network is split into " + std::to_string(components.groups.size()) +
                                " islands; every bus must connect to the slack bus");
    }

    auto const kinds = bus_kinds(net);
    auto const layout = unknown_layout(kinds);

    PFSolution sol;
    sol.state = options.initial_state ? *options.initial_state : flat_start(net);
    if (sol.state.size() != net.size()) {
        throw ShapeError("initial state has " + std::to_string(sol.state.size()) + " buses, network " +
                         std::to_string(net.size()));
    }

    std::vector<double> mismatch = compute_mismatch(net, ybus, sol.state);
    sol.max_mismatch = inf_norm(mismatch);

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    std::vector<Eigen::Triplet<double>> triplets;
    while (sol.max_mismatch > options.tolerance && sol.iterations < options.max_iterations) {
        Jacobian const jac = build_jacobian(ybus, sol.state, kinds);
        auto const dim = static_cast<Eigen::Index>(jac.dim);
        triplets.clear();
        for (std::size_t k = 0; k < jac.value.size(); ++k) {
            triplets.emplace_back(static_cast<int>(jac.row[k]), static_cast<int>(jac.col[k]), jac.value[k]);
        }
        Eigen::SparseMatrix<double> a(dim, dim);
        a.setFromTriplets(triplets.begin(), triplets.end());
        a.makeCompressed();
        lu.compute(a);
        if (lu.info() != Eigen::Success) {
            throw SolverError("singular Jacobian", sol.iterations + 1);
        }
        Eigen::Map<Eigen::VectorXd const> rhs(mismatch.data(), dim);
        Eigen::VectorXd const dx = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !dx.allFinite()) {
            throw SolverError("singular Jacobian", sol.iterations + 1);
        }

        std::size_t k = 0;
        for (auto i : layout.theta_buses) {
            sol.state.theta[i] += dx[static_cast<Eigen::Index>(k++)];
        }
        for (auto i : layout.v_buses) {
            sol.state.v[i] += dx[static_cast<Eigen::Index>(k++)];
        }
        ++sol.iterations;

        if (!within_band(sol.state, options)) {
            sol.diverged = true;
            mismatch = compute_mismatch(net, ybus, sol.state);
            sol.max_mismatch = inf_norm(mismatch);
            break;
        }
        mismatch = compute_mismatch(net, ybus, sol.state);
        sol.max_mismatch = inf_norm(mismatch);
    }
    sol.converged = !sol.diverged && std::isfinite(sol.max_mismatch) && sol.max_mismatch <= options.tolerance;

    auto const injections = compute_injections(ybus, sol.state);
    std::size_t const slack = net.slack_index();
    sol.slack_p = injections.p[slack] + net.buses[slack].p_demand;
    sol.slack_q = injections.q[slack] + net.buses[slack].q_demand;
    return sol;
}

}  // namespace gridflow::pf
