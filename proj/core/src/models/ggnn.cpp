#include "gridflow/models/ggnn.hpp"

#include <array>

#include "gridflow/common/error.hpp"

namespace gridflow::models::ggnn {

using ad::Tape;
using ad::Tensor;
using ad::Var;

ParamSet init_params(ModelConfig const& cfg, Rng& rng) {
    std::size_t const d = cfg.input_dim;
    std::size_t const h = cfg.hidden;
    std::size_t const r = cfg.readout_hidden;
    ParamSet p;
    p.add("w_in", glorot_uniform(d, h, rng));
    p.add("b_in", Tensor(1, h));
    p.add("w_m", glorot_uniform(h, h, rng));
    p.add("w_z", glorot_uniform(h, h, rng));
    p.add("u_z", glorot_uniform(h, h, rng));
    p.add("b_z", Tensor(1, h, 1.0));
    p.add("w_r", glorot_uniform(h, h, rng));
    p.add("u_r", glorot_uniform(h, h, rng));
    p.add("b_r", Tensor(1, h));
    p.add("w_h", glorot_uniform(h, h, rng));
    p.add("u_h", glorot_uniform(h, h, rng));
    p.add("b_h", Tensor(1, h));
    p.add("w_out1", glorot_uniform(h, r, rng));
    p.add("b_out1", Tensor(1, r));
    p.add("w_out2", glorot_uniform(r, 2, rng));
    p.add("b_out2", Tensor(1, 2));
    return p;
}

Var init_hidden(Tape& tape, Var features, Var w_in, Var b_in) {
    if (tape.value(features).cols() != tape.value(w_in).rows()) {
        throw ShapeError("ggnn: feature width " + std::to_string(tape.value(features).cols()) +
                         " does not match input projection " + tape.value(w_in).shape_string());
    }
    return tape.tanh(tape.add(tape.matmul(features, w_in), b_in));
}

Var aggregate_messages(Tape& tape, Var hidden, std::span<ad::IndexPair const> pairs, std::size_t num_nodes, Var w_m,
                       std::span<double const> weights) {
    return tape.matmul(tape.scatter_sum(hidden, pairs, num_nodes, weights), w_m);
}

GruVars gru_vars(std::span<Var const> p) {
    return {p[kWZ], p[kUZ], p[kBZ], p[kWR], p[kUR], p[kBR], p[kWH], p[kUH], p[kBH]};
}

Var gru_update(Tape& tape, Var messages, Var h_prev, GruVars const& g) {
    Var const z = tape.sigmoid(tape.add(tape.add(tape.matmul(messages, g.w_z), tape.matmul(h_prev, g.u_z)), g.b_z));
    Var const r = tape.sigmoid(tape.add(tape.add(tape.matmul(messages, g.w_r), tape.matmul(h_prev, g.u_r)), g.b_r));
    Var const gated = tape.mul(r, h_prev);
    Var const cand =
        tape.tanh(tape.add(tape.add(tape.matmul(messages, g.w_h), tape.matmul(gated, g.u_h)), g.b_h));
    Var const keep = tape.mul(z, h_prev);
    Var const one_minus_z = tape.add_scalar(tape.scale(z, -1.0), 1.0);
    return tape.add(keep, tape.mul(one_minus_z, cand));
}

Var forward(Tape& tape, ModelConfig const& cfg, std::span<Var const> p, GraphBatch const& batch, Mode mode,
            Rng& rng) {
    if (p.size() != kSlotCount) {
        throw ShapeError("ggnn: expected " + std::to_string(kSlotCount) + " parameters, got " +
                         std::to_string(p.size()));
    }
    std::size_t const n = batch.total_nodes();
    std::span<double const> weights;
    if (cfg.edge_weights) {
        weights = batch.edge_weights;
    }
    Var h = init_hidden(tape, tape.constant(batch.features), p[kWIn], p[kBIn]);
    GruVars const g = gru_vars(p);
    for (std::size_t t = 0; t < cfg.steps; ++t) {
        Var const m = aggregate_messages(tape, h, batch.pairs, n, p[kWM], weights);
        h = gru_update(tape, m, h, g);
    }
    Var hid = tape.tanh(tape.add(tape.matmul(h, p[kWOut1]), p[kBOut1]));
    if (mode == Mode::Train) {
        hid = tape.dropout(hid, cfg.dropout, rng);
    }
    return tape.add(tape.matmul(hid, p[kWOut2]), p[kBOut2]);
}

}  // namespace gridflow::models::ggnn
