#include "gridflow/models/gcn.hpp"

#include "gridflow/common/error.hpp"

namespace gridflow::models::gcn {

using ad::Tape;
using ad::Tensor;
using ad::Var;

ParamSet init_params(ModelConfig const& cfg, Rng& rng) {
    if (cfg.num_nodes == 0) {
        throw ConfigError("gcn: num_nodes must be set");
    }
    std::size_t const w = cfg.gcn_width;
    std::size_t const flat = cfg.num_nodes * w;
    ParamSet p;
    p.add("w_self0", glorot_uniform(cfg.input_dim, w, rng));
    p.add("w_nbr0", glorot_uniform(cfg.input_dim, w, rng));
    p.add("w_self1", glorot_uniform(w, w, rng));
    p.add("w_nbr1", glorot_uniform(w, w, rng));
    p.add("w_head1", glorot_uniform(flat, cfg.gcn_head, rng));
    p.add("b_head1", Tensor(1, cfg.gcn_head));
    p.add("w_head2", glorot_uniform(cfg.gcn_head, 2 * cfg.num_nodes, rng));
    p.add("b_head2", Tensor(1, 2 * cfg.num_nodes));
    return p;
}

Var layer(Tape& tape, Var h, std::span<ad::IndexPair const> pairs, std::size_t num_nodes, Var w_self, Var w_nbr) {
    Var const self = tape.matmul(h, w_self);
    Var const nbr = tape.matmul(tape.scatter_sum(h, pairs, num_nodes), w_nbr);
    return tape.relu(tape.add(self, nbr));
}

Var forward(Tape& tape, ModelConfig const& cfg, std::span<Var const> p, GraphBatch const& batch, Mode mode,
            Rng& rng) {
    if (p.size() != kSlotCount) {
        throw ShapeError("gcn: expected " + std::to_string(kSlotCount) + " parameters, got " +
                         std::to_string(p.size()));
    }
    for (std::size_t b = 0; b < batch.size(); ++b) {
        if (batch.nodes(b) != cfg.num_nodes) {
            throw ShapeError("gcn: model is built for " + std::to_string(cfg.num_nodes) + " nodes, sample has " +
                             std::to_string(batch.nodes(b)));
        }
    }
    std::size_t const n = batch.total_nodes();
    Var h = tape.constant(batch.features);
    h = layer(tape, h, batch.pairs, n, p[kSelf0], p[kNbr0]);
    h = layer(tape, h, batch.pairs, n, p[kSelf1], p[kNbr1]);
    Var const flat = tape.reshape(h, batch.size(), cfg.num_nodes * cfg.gcn_width);
    Var hid = tape.relu(tape.add(tape.matmul(flat, p[kWHead1]), p[kBHead1]));
    if (mode == Mode::Train) {
        hid = tape.dropout(hid, cfg.dropout, rng);
    }
    Var const out = tape.add(tape.matmul(hid, p[kWHead2]), p[kBHead2]);
    return tape.reshape(out, n, 2);
}

}  // namespace gridflow::models::gcn
