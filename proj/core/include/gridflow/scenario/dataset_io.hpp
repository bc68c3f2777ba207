#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "gridflow/scenario/dataset.hpp"

namespace gridflow::scenario {

// On-disk layout of a dataset directory:
//   network.json   canonical JSON of the base network
//   samples.jsonl  one GraphSample per line, in generation order, with its split tag
//   manifest.json  scenario config, generation stats, split sizes/seed, norm_stats
// Output is a deterministic function of the Dataset.
void write_dataset(Dataset const& ds, std::filesystem::path const& dir);
Dataset read_dataset(std::filesystem::path const& dir);

nlohmann::json to_json(GraphSample const& sample);
GraphSample sample_from_json(nlohmann::json const& j);

nlohmann::json to_json(NormStats const& stats);
NormStats norm_stats_from_json(nlohmann::json const& j);

nlohmann::json to_json(ScenarioConfig const& cfg);
ScenarioConfig scenario_config_from_json(nlohmann::json const& j);

}  // namespace gridflow::scenario
