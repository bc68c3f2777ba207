#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gridflow/models/model.hpp"

namespace gridflow::train {

struct TrainConfig {
    double learning_rate = 5e-5;
    double weight_decay = 1e-6;
    std::int64_t batch_size = 16;
    std::int64_t max_epochs = 800;
    std::int64_t patience = 100;
    double clip_norm = 1.0;
    double plateau_factor = 0.5;
    std::int64_t plateau_patience = 25;
    double min_lr = 1e-6;
    std::uint64_t seed = 0;
    double physics_loss_weight = 0.0;

    bool operator==(TrainConfig const&) const = default;
};

// Throws ConfigError when an invariant is violated.
void validate(TrainConfig const& cfg);

// A training config file: TrainConfig keys at top level plus an optional
// [model] table (hidden, steps, readout_hidden, dropout, edge_weights,
// gcn_width, gcn_head). Unknown keys are rejected.
struct RunConfig {
    TrainConfig train;
    models::ModelConfig model;
};

RunConfig run_config_from_json(nlohmann::json const& j);
nlohmann::json to_json(TrainConfig const& cfg);

// Reads JSON (".json") or TOML (anything else). ConfigError on failure.
RunConfig load_run_config(std::filesystem::path const& path);

// The TOML subset used by config files: comments, one level of [tables], and
// key = integer | float | boolean | "string". ConfigError names the line.
nlohmann::json parse_toml(std::string_view text);

}  // namespace gridflow::train
