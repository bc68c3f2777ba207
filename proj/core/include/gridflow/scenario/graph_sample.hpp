#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gridflow/grid/network.hpp"
#include "gridflow/pf/newton_raphson.hpp"
#include "gridflow/scenario/perturb.hpp"

namespace gridflow::scenario {

// Node feature columns.
enum Feature : std::size_t { kP = 0, kQ, kVInit, kThetaInit, kIsPQ, kIsPV, kIsSlack, kFeatureCount };

struct Edge {
    std::uint32_t src;
    std::uint32_t dst;

    bool operator==(Edge const&) const = default;
};

// One training example. Matrices are row-major.
struct GraphSample {
    std::size_t num_nodes = 0;
    std::vector<double> node_features;  // num_nodes x kFeatureCount, raw (not normalized)
    std::vector<Edge> edges;            // both directions of every in-service branch
    std::vector<double> edge_features;  // edges.size() x 2: |y|, arg(y) of the series admittance
    std::vector<double> targets;        // num_nodes x 2: |V|, theta
    std::uint64_t scenario_id = 0;
    bool topology_perturbed = false;
    TopologyChange topology;

    double feature(std::size_t node, std::size_t column) const {
        return node_features[node * kFeatureCount + column];
    }
    double v_target(std::size_t node) const { return targets[2 * node]; }
    double theta_target(std::size_t node) const { return targets[2 * node + 1]; }
    grid::BusKind kind(std::size_t node) const;

    bool operator==(GraphSample const&) const = default;
};

// P and Q hold scheduled net injections where the bus type fixes them and 0
// where they are unknowns (slack P and Q, PV Q). V/theta init are the flat
// start (PQ), |V| set-point (PV) and both set-points (slack).
// Throws PreconditionError for a non-converged solution.
GraphSample build_graph_sample(grid::Network const& net, pf::PFSolution const& sol);

}  // namespace gridflow::scenario
