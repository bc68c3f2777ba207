#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gridflow/grid/matpower.hpp"
#include "gridflow/grid/network.hpp"

namespace gridflow::test {

inline std::filesystem::path data_path(std::string const& name) { return std::filesystem::path(GRIDFLOW_DATA_DIR) / name; }

inline std::filesystem::path fixture_path(std::string const& name) {
    return std::filesystem::path(GRIDFLOW_FIXTURE_DIR) / name;
}

inline nlohmann::json load_fixture(std::string const& name) {
    std::ifstream in(fixture_path(name));
    return nlohmann::json::parse(in);
}

inline grid::Network const& ieee30() {
    static grid::Network const net = grid::load_matpower_case(data_path("ieee30.m"));
    return net;
}

// Slack bus 0 and PQ bus 1 (demand p_demand), joined by one r = 0, x = 0.1 line.
inline grid::Network two_bus(double p_demand = 0.0, double q_demand = 0.0) {
    grid::Network net;
    net.name = "two_bus";
    net.base_mva = 100.0;
    grid::Bus slack;
    slack.original_id = 1;
    slack.kind = grid::BusKind::Slack;
    slack.v_setpoint = 1.0;
    grid::Bus load;
    load.original_id = 2;
    load.kind = grid::BusKind::PQ;
    load.p_demand = p_demand;
    load.q_demand = q_demand;
    load.v_setpoint = 1.0;
    net.buses = {slack, load};
    grid::Branch br;
    br.from_bus = 0;
    br.to_bus = 1;
    br.r = 0.0;
    br.x = 0.1;
    net.branches = {br};
    grid::Generator gen;
    gen.bus = 0;
    gen.v_setpoint = 1.0;
    net.generators = {gen};
    return net;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(std::string const& name) {
    auto const dir = std::filesystem::temp_directory_path() / ("gridflow_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace gridflow::test
