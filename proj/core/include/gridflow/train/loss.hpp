#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridflow/autodiff/tape.hpp"
#include "gridflow/grid/network.hpp"
#include "gridflow/grid/ybus.hpp"
#include "gridflow/models/model.hpp"
#include "gridflow/scenario/graph_sample.hpp"

namespace gridflow::train {

// (1/N) sum_i (V_hat_i - V_i)^2 + (theta_hat_i - theta_i)^2 over every bus.
double mse_loss(models::Prediction const& pred, scenario::GraphSample const& sample);

// Per-sample loss above, averaged over the batch members. `pred` is the
// total_nodes x 2 model output.
ad::Var mse_loss(ad::Tape& tape, ad::Var pred, models::GraphBatch const& batch);

// Everything the power-balance residual of one sample needs, in local bus
// numbering: Y-bus entries and the scheduled injections that are fixed by
// the bus type (P at PV/PQ, Q at PQ).
struct PhysicsTerms {
    std::vector<std::uint32_t> row;
    std::vector<std::uint32_t> col;
    std::vector<double> g;
    std::vector<double> b;
    std::vector<std::uint32_t> p_rows;
    std::vector<double> p_sched;
    std::vector<std::uint32_t> q_rows;
    std::vector<double> q_sched;
};

PhysicsTerms physics_terms(grid::Network const& net, grid::AdmittanceMatrix const& ybus);
// Rebuilds the sample's network from the base case, its recorded topology
// change and its scheduled injections.
PhysicsTerms physics_terms(grid::Network const& base, scenario::GraphSample const& sample);

// Mean squared power mismatch at the predicted voltages over non-slack P and
// PQ Q entries.
double physics_residual_loss(models::Prediction const& pred, grid::Network const& net,
                             grid::AdmittanceMatrix const& ybus);

// Differentiable batch version; terms[b] belongs to batch member b. Averaged
// over batch members.
ad::Var physics_residual_loss(ad::Tape& tape, ad::Var pred, models::GraphBatch const& batch,
                              std::span<PhysicsTerms const* const> terms);

}  // namespace gridflow::train
