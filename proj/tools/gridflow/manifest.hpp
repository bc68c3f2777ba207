#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gridflow::cli {

// run_manifest.json written into every output directory.
struct RunManifest {
    std::string command;
    nlohmann::json config;  // effective configuration; digested
    nlohmann::json seeds = nlohmann::json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void write(std::filesystem::path const& dir) const;
};

// Prepares an output directory. An existing non-empty directory is an error
// unless `force`, in which case its contents are removed first.
void prepare_output_dir(std::filesystem::path const& dir, bool force);

}  // namespace gridflow::cli
