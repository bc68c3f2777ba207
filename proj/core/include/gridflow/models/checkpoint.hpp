#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "gridflow/models/model.hpp"
#include "gridflow/scenario/dataset.hpp"

namespace gridflow::models {

struct Checkpoint {
    Model model;
    scenario::NormStats norm_stats;
    nlohmann::json metadata = nlohmann::json::object();  // free-form run information

    bool operator==(Checkpoint const&) const = default;
};

// Layout: "GFCKPT01", u64 LE header length, JSON header (architecture, sizes,
// seed, norm_stats and their digest, parameter names and shapes, metadata),
// then every parameter value as an LE float64 in slot order.
std::string encode_checkpoint(Checkpoint const& ckpt);
Checkpoint decode_checkpoint(std::string const& bytes);  // IoError on a malformed blob

void write_checkpoint(Checkpoint const& ckpt, std::filesystem::path const& path);
Checkpoint read_checkpoint(std::filesystem::path const& path);

// Hex FNV-1a digest of the canonical JSON of the statistics.
std::string norm_stats_digest(scenario::NormStats const& stats);

nlohmann::json to_json(ModelConfig const& cfg);
ModelConfig model_config_from_json(nlohmann::json const& j);

}  // namespace gridflow::models
