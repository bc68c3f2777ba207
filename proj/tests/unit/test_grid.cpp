#include <algorithm>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gridflow/common/error.hpp"
#include "gridflow/grid/connectivity.hpp"
#include "gridflow/grid/matpower.hpp"
#include "gridflow/grid/network_json.hpp"
#include "gridflow/grid/ybus.hpp"
#include "support.hpp"

namespace gridflow {
namespace {

using grid::BusKind;

std::string read_file(std::filesystem::path const& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(MatpowerParse, Ieee30Counts) {
    auto const& net = test::ieee30();
    EXPECT_EQ(net.buses.size(), 30u);
    EXPECT_EQ(net.branches.size(), 41u);
    EXPECT_EQ(net.generators.size(), 6u);
    EXPECT_EQ(net.buses[net.slack_index()].original_id, 1);
    EXPECT_EQ(std::count_if(net.buses.begin(), net.buses.end(), [](auto const& b) { return b.kind == BusKind::PV; }),
              5);
}

TEST(MatpowerParse, PerUnitAndRadians) {
    auto const& net = test::ieee30();
    // Bus 2: Pd = 21.7 MW, Qd = 12.7 MVAr on 100 MVA.
    EXPECT_DOUBLE_EQ(net.buses[1].p_demand, 0.217);
    EXPECT_DOUBLE_EQ(net.buses[1].q_demand, 0.127);
    // Bus 10 carries a 19 MVAr shunt.
    EXPECT_DOUBLE_EQ(net.buses[9].shunt_b, 0.19);
    EXPECT_DOUBLE_EQ(net.buses[0].v_setpoint, 1.06);
}

TEST(MatpowerParse, TwoBusCase) {
    auto const net = grid::load_matpower_case(test::data_path("case2.m"));
    EXPECT_EQ(net.size(), 2u);
    EXPECT_EQ(net.branches.size(), 1u);
    EXPECT_EQ(net.buses[0].kind, BusKind::Slack);
    EXPECT_EQ(net.buses[1].kind, BusKind::PQ);
    EXPECT_DOUBLE_EQ(net.buses[1].p_demand, 0.5);
    EXPECT_EQ(net.branches[0].tap, 1.0);  // ratio 0 means nominal
}

TEST(MatpowerParse, CorruptedRowNamesLine) {
    std::string text = read_file(test::data_path("ieee30.m"));
    std::istringstream in(text);
    std::string line;
    std::string out;
    std::size_t line_no = 0;
    std::size_t corrupted = 0;
    bool in_branch = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find("mpc.branch") != std::string::npos) {
            in_branch = true;
        } else if (in_branch && corrupted == 0 && line.find(';') != std::string::npos) {
            // Keep only the first five columns of the first branch row.
            std::istringstream cols(line);
            std::string tok;
            std::string row;
            for (int k = 0; k < 5 && cols >> tok; ++k) row += tok + "\t";
            line = row + ";";
            corrupted = line_no;
        }
        out += line + "\n";
    }
    ASSERT_GT(corrupted, 0u);
    try {
        grid::parse_matpower_case(out);
        FAIL() << "expected a parse error";
    } catch (ParseError const& e) {
        EXPECT_EQ(e.line(), corrupted);
        EXPECT_NE(std::string(e.what()).find("line " + std::to_string(corrupted)), std::string::npos);
    }
}

TEST(MatpowerParse, NoSlackIsValidationError) {
    std::string text = read_file(test::data_path("case2.m"));
    auto const pos = text.find("\t1\t3\t");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 5, "\t1\t1\t");
    EXPECT_THROW(grid::parse_matpower_case(text), ValidationError);
}

TEST(MatpowerParse, DuplicateBusIdIsValidationError) {
    std::string text = read_file(test::data_path("case2.m"));
    auto const pos = text.find("\t2\t1\t50");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 3, "\t1\t");
    EXPECT_THROW(grid::parse_matpower_case(text), ValidationError);
}

TEST(MatpowerParse, VersionOneRejected) {
    std::string text = read_file(test::data_path("case2.m"));
    auto const pos = text.find("'2'");
    text.replace(pos, 3, "'1'");
    EXPECT_THROW(grid::parse_matpower_case(text), ParseError);
}

TEST(MatpowerParse, RoundTripsThroughWriter) {
    auto const& net = test::ieee30();
    auto const again = grid::parse_matpower_case(grid::write_matpower_case(net), net.name);
    EXPECT_EQ(again, net);
}

TEST(NetworkJson, RoundTrip) {
    auto const& net = test::ieee30();
    auto const text = grid::to_json(net).dump();
    EXPECT_EQ(grid::network_from_json(nlohmann::json::parse(text)), net);
}

TEST(Ybus, TwoBusHandValues) {
    auto const y = grid::build_ybus(test::two_bus());
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_EQ(y.at(i, j).real(), 0.0);
        }
    }
    EXPECT_DOUBLE_EQ(y.at(0, 0).imag(), -10.0);
    EXPECT_DOUBLE_EQ(y.at(1, 1).imag(), -10.0);
    EXPECT_DOUBLE_EQ(y.at(0, 1).imag(), 10.0);
    EXPECT_DOUBLE_EQ(y.at(1, 0).imag(), 10.0);
}

TEST(Ybus, NoBranchesGivesShuntDiagonal) {
    auto net = test::two_bus();
    net.buses[0].shunt_g = 0.3;
    net.buses[1].shunt_b = -0.2;
    net.branches.clear();
    auto const y = grid::build_ybus(net);
    EXPECT_EQ(y.nnz(), 2u);
    EXPECT_EQ(y.at(0, 0), std::complex<double>(0.3, 0.0));
    EXPECT_EQ(y.at(1, 1), std::complex<double>(0.0, -0.2));
    EXPECT_EQ(y.at(0, 1), std::complex<double>(0.0, 0.0));
}

TEST(Ybus, ZeroImpedanceRejected) {
    auto net = test::two_bus();
    net.branches[0].x = 0.0;
    EXPECT_THROW(grid::build_ybus(net), ValidationError);
}

TEST(Ybus, Ieee30MatchesDenseOracle) {
    auto const fx = test::load_fixture("ieee30_ybus.json");
    auto const y = grid::build_ybus(test::ieee30());
    ASSERT_EQ(y.n, fx["n"].get<std::size_t>());
    for (std::size_t i = 0; i < y.n; ++i) {
        for (std::size_t j = 0; j < y.n; ++j) {
            double const g = fx["g"][i][j];
            double const b = fx["b"][i][j];
            EXPECT_NEAR(y.at(i, j).real(), g, 1e-12 * std::max(1.0, std::abs(g))) << i << "," << j;
            EXPECT_NEAR(y.at(i, j).imag(), b, 1e-12 * std::max(1.0, std::abs(b))) << i << "," << j;
            if (g == 0.0 && b == 0.0 && i != j) {
                EXPECT_EQ(y.find(i, j), y.nnz()) << "spurious entry " << i << "," << j;
            }
        }
    }
}

TEST(Ybus, RowSumsEqualShuntAndChargingWithoutTaps) {
    auto net = test::ieee30();
    for (auto& br : net.branches) br.tap = 1.0;
    auto const y = grid::build_ybus(net);
    std::vector<std::complex<double>> expected(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        expected[i] = {net.buses[i].shunt_g, net.buses[i].shunt_b};
    }
    for (auto const& br : net.branches) {
        expected[br.from_bus] += std::complex<double>(0.0, br.b_charging / 2);
        expected[br.to_bus] += std::complex<double>(0.0, br.b_charging / 2);
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
        std::complex<double> sum = 0.0;
        for (std::size_t k = y.row_start[i]; k < y.row_start[i + 1]; ++k) sum += std::complex<double>(y.g[k], y.b[k]);
        EXPECT_NEAR(sum.real(), expected[i].real(), 1e-9);
        EXPECT_NEAR(sum.imag(), expected[i].imag(), 1e-9);
    }
}

TEST(Ybus, PermutationInvariantBitExact) {
    auto const& net = test::ieee30();
    auto const reference = grid::build_ybus(net);
    std::mt19937 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto shuffled = net;
        std::shuffle(shuffled.branches.begin(), shuffled.branches.end(), gen);
        EXPECT_EQ(grid::build_ybus(shuffled), reference);
    }
}

TEST(Ybus, SymmetricWithoutTapsAndShifts) {
    auto net = test::ieee30();
    for (auto& br : net.branches) br.tap = 1.0;
    auto const y = grid::build_ybus(net);
    for (std::size_t i = 0; i < y.n; ++i) {
        for (std::size_t k = y.row_start[i]; k < y.row_start[i + 1]; ++k) {
            auto const j = y.col[k];
            auto const kt = y.find(j, i);
            ASSERT_NE(kt, y.nnz());
            EXPECT_EQ(y.g[k], y.g[kt]);
            EXPECT_EQ(y.b[k], y.b[kt]);
        }
    }
}

TEST(Ybus, OutOfServiceBranchIgnored) {
    auto net = test::two_bus();
    net.branches[0].in_service = false;
    auto const y = grid::build_ybus(net);
    EXPECT_EQ(y.at(0, 1), std::complex<double>(0.0, 0.0));
    EXPECT_EQ(y.at(0, 0), std::complex<double>(0.0, 0.0));
}

TEST(Connectivity, Ieee30Connected) {
    auto const c = grid::check_connectivity(test::ieee30());
    ASSERT_EQ(c.groups.size(), 1u);
    EXPECT_EQ(c.groups[0].size(), 30u);
    EXPECT_EQ(c.slack_component, 0u);
}

TEST(Connectivity, TwoBusOutageSplits) {
    auto net = test::two_bus();
    net.branches[0].in_service = false;
    auto const c = grid::check_connectivity(net);
    ASSERT_EQ(c.groups.size(), 2u);
    EXPECT_EQ(c.groups[0], std::vector<std::size_t>{0});
    EXPECT_EQ(c.groups[1], std::vector<std::size_t>{1});
    EXPECT_FALSE(c.connected());
}

// Components by breadth-first search, as sorted groups.
std::vector<std::vector<std::size_t>> bfs_components(grid::Network const& net) {
    std::vector<std::vector<std::size_t>> adj(net.size());
    for (auto const& br : net.branches) {
        if (!br.in_service) continue;
        adj[br.from_bus].push_back(br.to_bus);
        adj[br.to_bus].push_back(br.from_bus);
    }
    std::vector<int> seen(net.size(), 0);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < net.size(); ++s) {
        if (seen[s]) continue;
        std::vector<std::size_t> group;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            auto const u = q.front();
            q.pop();
            group.push_back(u);
            for (auto v : adj[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
            }
        }
        std::sort(group.begin(), group.end());
        out.push_back(group);
    }
    return out;
}

TEST(Connectivity, MatchesBfsForEverySingleOutage) {
    auto const& base = test::ieee30();
    int bridges = 0;
    for (std::size_t k = 0; k < base.branches.size(); ++k) {
        auto net = base;
        net.branches[k].in_service = false;
        auto const c = grid::check_connectivity(net);
        EXPECT_EQ(c.groups, bfs_components(net)) << "branch " << k;
        bridges += c.connected() ? 0 : 1;
    }
    EXPECT_GT(bridges, 0);  // e.g. the radial feed to bus 26
}

}  // namespace
}  // namespace gridflow
