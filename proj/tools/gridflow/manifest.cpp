#include "manifest.hpp"

#include <fstream>

#include "errors.hpp"
#include "gridflow/common/digest.hpp"
#include "gridflow/common/error.hpp"
#include "gridflow/version.hpp"

namespace gridflow::cli {

void RunManifest::write(std::filesystem::path const& dir) const {
    double const wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::json j = {{"command", command},
                        {"config", config},
                        {"config_digest", fnv1a64_hex(config.dump())},
                        {"seeds", seeds},
                        {"inputs", inputs},
                        {"outputs", outputs},
                        {"tool_version", kVersion},
                        {"wall_time_seconds", wall}};
    auto const path = dir / "run_manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

void prepare_output_dir(std::filesystem::path const& dir, bool force) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) {
            throw UsageError("output path " + dir.string() + " exists and is not a directory");
        }
        if (!fs::is_empty(dir, ec)) {
            if (!force) {
                throw UsageError("output directory " + dir.string() + " is not empty (use --force to overwrite)");
            }
            for (auto const& entry : fs::directory_iterator(dir)) {
                fs::remove_all(entry.path());
            }
        }
    }
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
}

}  // namespace gridflow::cli
