#include "gridflow/scenario/dataset_io.hpp"

#include <fstream>
#include <string>

#include "gridflow/common/error.hpp"
#include "gridflow/grid/network_json.hpp"

namespace gridflow::scenario {

namespace fs = std::filesystem;

namespace {

char const* to_string(TopologyChange::Kind kind) {
    switch (kind) {
        case TopologyChange::Kind::None: return "none";
        case TopologyChange::Kind::Outage: return "outage";
        case TopologyChange::Kind::Tap: return "tap";
    }
    return "?";
}

TopologyChange::Kind change_kind(std::string const& s) {
    if (s == "none") return TopologyChange::Kind::None;
    if (s == "outage") return TopologyChange::Kind::Outage;
    if (s == "tap") return TopologyChange::Kind::Tap;
    throw ValidationError("unknown topology change '" + s + "'");
}

nlohmann::json rows(std::vector<double> const& flat, std::size_t width) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t r = 0; r * width < flat.size(); ++r) {
        out.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(r * width),
                                          flat.begin() + static_cast<std::ptrdiff_t>((r + 1) * width)));
    }
    return out;
}

std::vector<double> flatten(nlohmann::json const& j, std::size_t width, char const* what) {
    std::vector<double> out;
    for (auto const& row : j) {
        auto values = row.get<std::vector<double>>();
        if (values.size() != width) {
            throw ValidationError(std::string(what) + " row has " + std::to_string(values.size()) +
                                  " entries, expected " + std::to_string(width));
        }
        out.insert(out.end(), values.begin(), values.end());
    }
    return out;
}

void write_text(fs::path const& path, std::string const& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

nlohmann::json read_json(fs::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (nlohmann::json::exception const& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace

nlohmann::json to_json(GraphSample const& s) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto const& e : s.edges) {
        edges.push_back({e.src, e.dst});
    }
    return {{"scenario_id", s.scenario_id},
            {"num_nodes", s.num_nodes},
            {"topology_perturbed", s.topology_perturbed},
            {"topology",
             {{"kind", to_string(s.topology.kind)}, {"branch", s.topology.branch}, {"tap", s.topology.tap}}},
            {"node_features", rows(s.node_features, kFeatureCount)},
            {"edges", std::move(edges)},
            {"edge_features", rows(s.edge_features, 2)},
            {"targets", rows(s.targets, 2)}};
}

GraphSample sample_from_json(nlohmann::json const& j) {
    try {
        GraphSample s;
        s.scenario_id = j.at("scenario_id").get<std::uint64_t>();
        s.num_nodes = j.at("num_nodes").get<std::size_t>();
        s.topology_perturbed = j.at("topology_perturbed").get<bool>();
        auto const& t = j.at("topology");
        s.topology.kind = change_kind(t.at("kind").get<std::string>());
        s.topology.branch = t.at("branch").get<std::size_t>();
        s.topology.tap = t.at("tap").get<double>();
        s.node_features = flatten(j.at("node_features"), kFeatureCount, "node_features");
        for (auto const& e : j.at("edges")) {
            s.edges.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>()});
        }
        s.edge_features = flatten(j.at("edge_features"), 2, "edge_features");
        s.targets = flatten(j.at("targets"), 2, "targets");
        if (s.node_features.size() != s.num_nodes * kFeatureCount || s.targets.size() != 2 * s.num_nodes ||
            s.edge_features.size() != 2 * s.edges.size()) {
            throw ValidationError("graph sample arrays disagree with num_nodes");
        }
        for (auto const& e : s.edges) {
            if (e.src >= s.num_nodes || e.dst >= s.num_nodes) {
                throw ValidationError("edge references a missing node");
            }
        }
        return s;
    } catch (nlohmann::json::exception const& e) {
        throw ValidationError(std::string("malformed graph sample: ") + e.what());
    }
}

nlohmann::json to_json(NormStats const& stats) {
    return {{"mean", stats.mean}, {"std", stats.std}, {"constant", stats.constant}, {"exempt", stats.exempt}};
}

NormStats norm_stats_from_json(nlohmann::json const& j) {
    NormStats s;
    s.mean = j.at("mean").get<std::array<double, kFeatureCount>>();
    s.std = j.at("std").get<std::array<double, kFeatureCount>>();
    s.constant = j.at("constant").get<std::array<bool, kFeatureCount>>();
    s.exempt = j.at("exempt").get<std::array<bool, kFeatureCount>>();
    return s;
}

nlohmann::json to_json(ScenarioConfig const& c) {
    return {{"load_low", c.load_low},
            {"load_high", c.load_high},
            {"topology_fraction", c.topology_fraction},
            {"samples", c.samples},
            {"seed", c.seed},
            {"tap_step", c.tap_step},
            {"tap_max_steps", c.tap_max_steps},
            {"v_min", c.v_min},
            {"v_max", c.v_max},
            {"discard_window", c.discard_window}};
}

ScenarioConfig scenario_config_from_json(nlohmann::json const& j) {
    ScenarioConfig c;
    c.load_low = j.at("load_low").get<double>();
    c.load_high = j.at("load_high").get<double>();
    c.topology_fraction = j.at("topology_fraction").get<double>();
    c.samples = j.at("samples").get<std::int64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.tap_step = j.at("tap_step").get<double>();
    c.tap_max_steps = j.at("tap_max_steps").get<int>();
    c.v_min = j.at("v_min").get<double>();
    c.v_max = j.at("v_max").get<double>();
    c.discard_window = j.at("discard_window").get<std::int64_t>();
    return c;
}

void write_dataset(Dataset const& ds, fs::path const& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_text(dir / "network.json", grid::to_json(ds.base).dump(1) + "\n");

    std::string lines;
    for (std::size_t k = 0; k < ds.samples.size(); ++k) {
        nlohmann::json j = to_json(ds.samples[k]);
        if (!ds.split_assignment.empty()) {
            j["split"] = to_string(ds.split_assignment[k]);
        }
        lines += j.dump();
        lines += '\n';
    }
    write_text(dir / "samples.jsonl", lines);

    std::size_t topo = 0;
    for (auto const& s : ds.samples) {
        topo += s.topology_perturbed ? 1 : 0;
    }
    nlohmann::json manifest = {
        {"format", "gridflow-dataset/1"},
        {"system", ds.base.name},
        {"num_samples", ds.samples.size()},
        {"topology_perturbed", topo},
        {"load_and_topology_composed", true},
        {"config", to_json(ds.config)},
        {"generation",
         {{"scenarios", ds.stats.scenarios},
          {"discarded", ds.stats.discarded},
          {"non_converged", ds.stats.non_converged},
          {"out_of_band", ds.stats.out_of_band},
          {"topology_failures", ds.stats.topology_failures}}},
    };
    if (!ds.split_assignment.empty()) {
        manifest["split"] = {{"seed", ds.split_seed},
                             {"train", ds.indices(Split::Train).size()},
                             {"val", ds.indices(Split::Val).size()},
                             {"test", ds.indices(Split::Test).size()}};
        manifest["norm_stats"] = to_json(ds.norm_stats);
    }
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

Dataset read_dataset(fs::path const& dir) {
    Dataset ds;
    ds.base = grid::network_from_json(read_json(dir / "network.json"));
    nlohmann::json const manifest = read_json(dir / "manifest.json");
    try {
        ds.config = scenario_config_from_json(manifest.at("config"));
        auto const& g = manifest.at("generation");
        ds.stats.scenarios = g.at("scenarios").get<std::int64_t>();
        ds.stats.discarded = g.at("discarded").get<std::int64_t>();
        ds.stats.non_converged = g.at("non_converged").get<std::int64_t>();
        ds.stats.out_of_band = g.at("out_of_band").get<std::int64_t>();
        ds.stats.topology_failures = g.at("topology_failures").get<std::int64_t>();
        if (manifest.contains("split")) {
            ds.split_seed = manifest.at("split").at("seed").get<std::uint64_t>();
            ds.norm_stats = norm_stats_from_json(manifest.at("norm_stats"));
        }
    } catch (nlohmann::json::exception const& e) {
        throw ValidationError("malformed dataset manifest: " + std::string(e.what()));
    }

    std::ifstream in(dir / "samples.jsonl", std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + (dir / "samples.jsonl").string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (nlohmann::json::exception const& e) {
            throw ParseError(std::string("samples.jsonl: ") + e.what(), line_no);
        }
        ds.samples.push_back(sample_from_json(j));
        if (j.contains("split")) {
            ds.split_assignment.push_back(split_from_string(j.at("split").get<std::string>()));
        }
    }
    if (!ds.split_assignment.empty() && ds.split_assignment.size() != ds.samples.size()) {
        throw ValidationError("only some samples carry a split tag");
    }
    return ds;
}

}  // namespace gridflow::scenario
