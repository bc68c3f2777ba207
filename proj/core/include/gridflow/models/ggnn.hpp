#pragma once

#include <span>

#include "gridflow/models/model.hpp"

namespace gridflow::models::ggnn {

// Parameter slots, in declaration (and checkpoint) order.
enum Slot : std::size_t {
    kWIn, kBIn, kWM,
    kWZ, kUZ, kBZ,
    kWR, kUR, kBR,
    kWH, kUH, kBH,
    kWOut1, kBOut1, kWOut2, kBOut2,
    kSlotCount
};

ParamSet init_params(ModelConfig const& cfg, Rng& rng);

// tanh(x W_in + b_in)
ad::Var init_hidden(ad::Tape& tape, ad::Var features, ad::Var w_in, ad::Var b_in);

// m_i = sum over in-neighbors j of h_j W_m (optionally weighted per pair).
ad::Var aggregate_messages(ad::Tape& tape, ad::Var hidden, std::span<ad::IndexPair const> pairs,
                           std::size_t num_nodes, ad::Var w_m, std::span<double const> weights = {});

struct GruVars {
    ad::Var w_z, u_z, b_z;
    ad::Var w_r, u_r, b_r;
    ad::Var w_h, u_h, b_h;
};

GruVars gru_vars(std::span<ad::Var const> params);

// z = sig(m W_z + h U_z + b_z), r = sig(m W_r + h U_r + b_r),
// c = tanh(m W_h + (r * h) U_h + b_h), h' = z * h + (1 - z) * c.
ad::Var gru_update(ad::Tape& tape, ad::Var messages, ad::Var h_prev, GruVars const& g);

ad::Var forward(ad::Tape& tape, ModelConfig const& cfg, std::span<ad::Var const> params, GraphBatch const& batch,
                Mode mode, Rng& rng);

}  // namespace gridflow::models::ggnn
