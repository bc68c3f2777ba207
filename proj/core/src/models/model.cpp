#include "gridflow/models/model.hpp"

#include "gridflow/common/error.hpp"
#include "gridflow/models/gcn.hpp"
#include "gridflow/models/ggnn.hpp"

namespace gridflow::models {

char const* to_string(Arch arch) { return arch == Arch::GGNN ? "ggnn" : "gcn"; }

Arch arch_from_string(std::string_view s) {
    if (s == "ggnn") return Arch::GGNN;
    if (s == "gcn") return Arch::GCN;
    throw ConfigError("unknown model '" + std::string(s) + "' (expected ggnn or gcn)");
}

void validate(ModelConfig const& cfg) {
    if (cfg.input_dim == 0) throw ConfigError("model: input_dim must be positive");
    if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) throw ConfigError("model: dropout must lie in [0, 1)");
    if (cfg.arch == Arch::GGNN) {
        if (cfg.steps < 1) throw ConfigError("ggnn: steps must be at least 1");
        if (cfg.hidden == 0 || cfg.readout_hidden == 0) throw ConfigError("ggnn: widths must be positive");
    } else {
        if (cfg.num_nodes == 0) throw ConfigError("gcn: num_nodes must be positive");
        if (cfg.gcn_width == 0 || cfg.gcn_head == 0) throw ConfigError("gcn: widths must be positive");
    }
}

GraphBatch make_batch(std::span<scenario::GraphSample const* const> samples, scenario::NormStats const& stats) {
    GraphBatch batch;
    std::size_t total = 0;
    for (auto const* s : samples) {
        total += s->num_nodes;
    }
    batch.features = ad::Tensor(total, scenario::kFeatureCount);
    batch.targets = ad::Tensor(total, 2);
    std::size_t row = 0;
    for (auto const* s : samples) {
        auto const x = scenario::normalize_features(*s, stats);
        std::copy(x.begin(), x.end(), batch.features.data() + row * scenario::kFeatureCount);
        std::copy(s->targets.begin(), s->targets.end(), batch.targets.data() + row * 2);
        auto const base = static_cast<std::uint32_t>(row);
        for (std::size_t e = 0; e < s->edges.size(); ++e) {
            batch.pairs.push_back({base + s->edges[e].src, base + s->edges[e].dst});
            batch.edge_weights.push_back(s->edge_features[2 * e]);
        }
        row += s->num_nodes;
        batch.offsets.push_back(row);
    }
    return batch;
}

GraphBatch make_batch(scenario::GraphSample const& sample, scenario::NormStats const& stats) {
    scenario::GraphSample const* one[] = {&sample};
    return make_batch(one, stats);
}

Model init_model(ModelConfig const& cfg) {
    validate(cfg);
    Rng rng(derive_seed(cfg.seed, 0x1A17));
    Model m{cfg, {}};
    m.params = cfg.arch == Arch::GGNN ? ggnn::init_params(cfg, rng) : gcn::init_params(cfg, rng);
    return m;
}

std::vector<ad::Var> bind_parameters(ad::Tape& tape, ParamSet const& params) {
    std::vector<ad::Var> vars;
    vars.reserve(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        vars.push_back(tape.parameter(params[k], k));
    }
    return vars;
}

ad::Var model_forward(ad::Tape& tape, Model const& model, std::span<ad::Var const> params, GraphBatch const& batch,
                      Mode mode, Rng& rng) {
    if (model.config.arch == Arch::GGNN) {
        return ggnn::forward(tape, model.config, params, batch, mode, rng);
    }
    return gcn::forward(tape, model.config, params, batch, mode, rng);
}

std::vector<Prediction> predict(Model const& model, GraphBatch const& batch) {
    ad::Tape tape;
    auto const vars = bind_parameters(tape, model.params);
    Rng unused(0);
    ad::Tensor const& out = tape.value(model_forward(tape, model, vars, batch, Mode::Eval, unused));
    std::vector<Prediction> preds(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        for (std::size_t i = batch.offsets[b]; i < batch.offsets[b + 1]; ++i) {
            preds[b].v_hat.push_back(out(i, 0));
            preds[b].theta_hat.push_back(out(i, 1));
        }
    }
    return preds;
}

Prediction predict(Model const& model, scenario::GraphSample const& sample, scenario::NormStats const& stats) {
    return predict(model, make_batch(sample, stats)).front();
}

}  // namespace gridflow::models
