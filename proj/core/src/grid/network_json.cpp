#include "gridflow/grid/network_json.hpp"

#include "gridflow/common/error.hpp"

namespace gridflow::grid {

namespace {

BusKind kind_from_string(std::string const& s) {
    if (s == "slack") return BusKind::Slack;
    if (s == "pv") return BusKind::PV;
    if (s == "pq") return BusKind::PQ;
    throw ValidationError("unknown bus kind '" + s + "'");
}

}  // namespace

nlohmann::json to_json(Network const& net) {
    nlohmann::json buses = nlohmann::json::array();
    for (auto const& b : net.buses) {
        buses.push_back({{"id", b.original_id},
                         {"kind", to_string(b.kind)},
                         {"p_demand", b.p_demand},
                         {"q_demand", b.q_demand},
                         {"v_setpoint", b.v_setpoint},
                         {"theta_setpoint", b.theta_setpoint},
                         {"shunt_g", b.shunt_g},
                         {"shunt_b", b.shunt_b}});
    }
    nlohmann::json branches = nlohmann::json::array();
    for (auto const& br : net.branches) {
        branches.push_back({{"from", br.from_bus},
                            {"to", br.to_bus},
                            {"r", br.r},
                            {"x", br.x},
                            {"b_charging", br.b_charging},
                            {"tap", br.tap},
                            {"shift", br.shift},
                            {"in_service", br.in_service}});
    }
    nlohmann::json gens = nlohmann::json::array();
    for (auto const& g : net.generators) {
        gens.push_back({{"bus", g.bus},
                        {"p_gen", g.p_gen},
                        {"q_gen", g.q_gen},
                        {"v_setpoint", g.v_setpoint},
                        {"in_service", g.in_service}});
    }
    return {{"name", net.name},
            {"base_mva", net.base_mva},
            {"buses", std::move(buses)},
            {"branches", std::move(branches)},
            {"generators", std::move(gens)}};
}

Network network_from_json(nlohmann::json const& j) {
    Network net;
    try {
        net.name = j.value("name", std::string{});
        net.base_mva = j.at("base_mva").get<double>();
        for (auto const& b : j.at("buses")) {
            Bus bus;
            bus.original_id = b.at("id").get<int>();
            bus.kind = kind_from_string(b.at("kind").get<std::string>());
            bus.p_demand = b.at("p_demand").get<double>();
            bus.q_demand = b.at("q_demand").get<double>();
            bus.v_setpoint = b.at("v_setpoint").get<double>();
            bus.theta_setpoint = b.at("theta_setpoint").get<double>();
            bus.shunt_g = b.at("shunt_g").get<double>();
            bus.shunt_b = b.at("shunt_b").get<double>();
            net.buses.push_back(bus);
        }
        for (auto const& b : j.at("branches")) {
            Branch br;
            br.from_bus = b.at("from").get<std::size_t>();
            br.to_bus = b.at("to").get<std::size_t>();
            br.r = b.at("r").get<double>();
            br.x = b.at("x").get<double>();
            br.b_charging = b.at("b_charging").get<double>();
            br.tap = b.at("tap").get<double>();
            br.shift = b.at("shift").get<double>();
            br.in_service = b.at("in_service").get<bool>();
            net.branches.push_back(br);
        }
        for (auto const& g : j.at("generators")) {
            Generator gen;
            gen.bus = g.at("bus").get<std::size_t>();
            gen.p_gen = g.at("p_gen").get<double>();
            gen.q_gen = g.at("q_gen").get<double>();
            gen.v_setpoint = g.at("v_setpoint").get<double>();
            gen.in_service = g.at("in_service").get<bool>();
            net.generators.push_back(gen);
        }
    } catch (nlohmann::json::exception const& e) {
        throw ValidationError(std::string("malformed network JSON: ") + e.what());
    }
    validate(net);
    return net;
}

}  // namespace gridflow::grid
