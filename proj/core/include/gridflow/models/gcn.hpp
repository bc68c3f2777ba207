#pragma once

#include <span>

#include "gridflow/models/model.hpp"

namespace gridflow::models::gcn {

enum Slot : std::size_t {
    kSelf0, kNbr0, kSelf1, kNbr1,
    kWHead1, kBHead1, kWHead2, kBHead2,
    kSlotCount
};

// Requires cfg.num_nodes > 0.
ParamSet init_params(ModelConfig const& cfg, Rng& rng);

// relu(h W_self + (sum of neighbor rows) W_nbr)
ad::Var layer(ad::Tape& tape, ad::Var h, std::span<ad::IndexPair const> pairs, std::size_t num_nodes, ad::Var w_self,
              ad::Var w_nbr);

// Throws ShapeError when a batch member's node count differs from cfg.num_nodes.
ad::Var forward(ad::Tape& tape, ModelConfig const& cfg, std::span<ad::Var const> params, GraphBatch const& batch,
                Mode mode, Rng& rng);

}  // namespace gridflow::models::gcn
