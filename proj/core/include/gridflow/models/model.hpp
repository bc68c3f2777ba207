#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gridflow/autodiff/tape.hpp"
#include "gridflow/models/params.hpp"
#include "gridflow/scenario/dataset.hpp"
#include "gridflow/scenario/graph_sample.hpp"

namespace gridflow::models {

enum class Arch : std::uint8_t { GGNN, GCN };
enum class Mode : std::uint8_t { Train, Eval };

char const* to_string(Arch arch);
Arch arch_from_string(std::string_view s);  // "ggnn" | "gcn", else ConfigError

struct ModelConfig {
    Arch arch = Arch::GGNN;
    std::size_t input_dim = scenario::kFeatureCount;
    double dropout = 0.1;

    // GGNN
    std::size_t hidden = 32;
    std::size_t steps = 8;
    std::size_t readout_hidden = 64;
    bool edge_weights = false;  // scale messages by |y| of the connecting branch

    // GCN
    std::size_t gcn_width = 12;
    std::size_t gcn_head = 128;
    std::size_t num_nodes = 0;  // the head is bound to this node count

    std::uint64_t seed = 0;

    bool operator==(ModelConfig const&) const = default;
};

// Throws ConfigError on zero sizes, steps < 1 or a dropout outside [0, 1).
void validate(ModelConfig const& cfg);

struct Model {
    ModelConfig config;
    ParamSet params;

    bool operator==(Model const&) const = default;
};

struct Prediction {
    std::vector<double> v_hat;
    std::vector<double> theta_hat;

    std::size_t size() const { return v_hat.size(); }
};

// Disjoint union of graph samples. Node rows of sample b occupy
// [offsets[b], offsets[b + 1]); pairs are (src, dst) in union numbering.
struct GraphBatch {
    std::vector<std::size_t> offsets{0};
    ad::Tensor features;  // normalized, total_nodes x input_dim
    ad::Tensor targets;   // total_nodes x 2 (|V|, theta)
    std::vector<ad::IndexPair> pairs;
    std::vector<double> edge_weights;  // |y| per pair

    std::size_t size() const { return offsets.size() - 1; }
    std::size_t total_nodes() const { return offsets.back(); }
    std::size_t nodes(std::size_t b) const { return offsets[b + 1] - offsets[b]; }
};

GraphBatch make_batch(std::span<scenario::GraphSample const* const> samples, scenario::NormStats const& stats);
GraphBatch make_batch(scenario::GraphSample const& sample, scenario::NormStats const& stats);

// Fresh parameters drawn from cfg.seed.
Model init_model(ModelConfig const& cfg);

// Registers every parameter on the tape; handle k has slot k.
std::vector<ad::Var> bind_parameters(ad::Tape& tape, ParamSet const& params);

// total_nodes x 2 output (|V| hat, theta hat) for the whole batch. `rng`
// drives dropout and is untouched in eval mode.
ad::Var model_forward(ad::Tape& tape, Model const& model, std::span<ad::Var const> params, GraphBatch const& batch,
                      Mode mode, Rng& rng);

// Eval-mode predictions, one per batch member.
std::vector<Prediction> predict(Model const& model, GraphBatch const& batch);
Prediction predict(Model const& model, scenario::GraphSample const& sample, scenario::NormStats const& stats);

}  // namespace gridflow::models
