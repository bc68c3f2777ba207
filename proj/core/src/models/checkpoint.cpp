#include "gridflow/models/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gridflow/common/digest.hpp"
#include "gridflow/common/error.hpp"
#include "gridflow/scenario/dataset_io.hpp"

namespace gridflow::models {

namespace {

constexpr char kMagic[] = "GFCKPT01";
constexpr std::size_t kMagicSize = sizeof(kMagic) - 1;

void put_u64(std::string& out, std::uint64_t x) {
    for (int k = 0; k < 8; ++k) {
        out.push_back(static_cast<char>((x >> (8 * k)) & 0xFF));
    }
}

std::uint64_t get_u64(std::string const& in, std::size_t pos) {
    std::uint64_t x = 0;
    for (int k = 0; k < 8; ++k) {
        x |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + k])) << (8 * k);
    }
    return x;
}

}  // namespace

nlohmann::json to_json(ModelConfig const& cfg) {
    return {{"arch", to_string(cfg.arch)},
            {"input_dim", cfg.input_dim},
            {"dropout", cfg.dropout},
            {"hidden", cfg.hidden},
            {"steps", cfg.steps},
            {"readout_hidden", cfg.readout_hidden},
            {"edge_weights", cfg.edge_weights},
            {"gcn_width", cfg.gcn_width},
            {"gcn_head", cfg.gcn_head},
            {"num_nodes", cfg.num_nodes},
            {"seed", cfg.seed}};
}

ModelConfig model_config_from_json(nlohmann::json const& j) {
    ModelConfig cfg;
    cfg.arch = arch_from_string(j.at("arch").get<std::string>());
    cfg.input_dim = j.at("input_dim").get<std::size_t>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.hidden = j.at("hidden").get<std::size_t>();
    cfg.steps = j.at("steps").get<std::size_t>();
    cfg.readout_hidden = j.at("readout_hidden").get<std::size_t>();
    cfg.edge_weights = j.at("edge_weights").get<bool>();
    cfg.gcn_width = j.at("gcn_width").get<std::size_t>();
    cfg.gcn_head = j.at("gcn_head").get<std::size_t>();
    cfg.num_nodes = j.at("num_nodes").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

std::string norm_stats_digest(scenario::NormStats const& stats) {
    return fnv1a64_hex(scenario::to_json(stats).dump());
}

std::string encode_checkpoint(Checkpoint const& ckpt) {
    auto const& params = ckpt.model.params;
    nlohmann::json header;
    header["format"] = "gridflow-checkpoint/1";
    header["model"] = to_json(ckpt.model.config);
    header["norm_stats"] = scenario::to_json(ckpt.norm_stats);
    header["norm_stats_digest"] = norm_stats_digest(ckpt.norm_stats);
    header["metadata"] = ckpt.metadata;
    auto& list = header["parameters"] = nlohmann::json::array();
    for (std::size_t k = 0; k < params.size(); ++k) {
        list.push_back({{"name", params.name(k)}, {"shape", {params[k].rows(), params[k].cols()}}});
    }
    std::string const text = header.dump();

    std::string out(kMagic, kMagicSize);
    put_u64(out, text.size());
    out += text;
    out.reserve(out.size() + 8 * params.scalar_count());
    for (auto const& t : params.values()) {
        for (double v : t.values()) {
            put_u64(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    return out;
}

Checkpoint decode_checkpoint(std::string const& bytes) {
    if (bytes.size() < kMagicSize + 8 || bytes.compare(0, kMagicSize, kMagic) != 0) {
        throw IoError("not a gridflow checkpoint");
    }
    std::uint64_t const len = get_u64(bytes, kMagicSize);
    std::size_t pos = kMagicSize + 8;
    if (len > bytes.size() - pos) {
        throw IoError("checkpoint header truncated");
    }
    Checkpoint ckpt;
    try {
        auto const header = nlohmann::json::parse(bytes.substr(pos, len));
        pos += len;
        ckpt.model.config = model_config_from_json(header.at("model"));
        ckpt.norm_stats = scenario::norm_stats_from_json(header.at("norm_stats"));
        if (header.at("norm_stats_digest").get<std::string>() != norm_stats_digest(ckpt.norm_stats)) {
            throw IoError("checkpoint norm_stats digest mismatch");
        }
        ckpt.metadata = header.at("metadata");
        for (auto const& p : header.at("parameters")) {
            auto const rows = p.at("shape").at(0).get<std::size_t>();
            auto const cols = p.at("shape").at(1).get<std::size_t>();
            if (rows * cols > (bytes.size() - pos) / 8) {
                throw IoError("checkpoint parameter block truncated");
            }
            ad::Tensor t(rows, cols);
            for (std::size_t k = 0; k < t.size(); ++k, pos += 8) {
                t[k] = std::bit_cast<double>(get_u64(bytes, pos));
            }
            ckpt.model.params.add(p.at("name").get<std::string>(), std::move(t));
        }
    } catch (nlohmann::json::exception const& e) {
        throw IoError(std::string("malformed checkpoint header: ") + e.what());
    }
    if (pos != bytes.size()) {
        throw IoError("checkpoint has trailing bytes");
    }
    return ckpt;
}

void write_checkpoint(Checkpoint const& ckpt, std::filesystem::path const& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    std::string const bytes = encode_checkpoint(ckpt);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

Checkpoint read_checkpoint(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_checkpoint(ss.str());
}

}  // namespace gridflow::models
