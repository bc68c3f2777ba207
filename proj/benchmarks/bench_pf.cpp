#include <benchmark/benchmark.h>

#include <filesystem>

#include "gridflow/grid/matpower.hpp"
#include "gridflow/grid/ybus.hpp"
#include "gridflow/pf/jacobian.hpp"
#include "gridflow/pf/newton_raphson.hpp"

namespace {

using namespace gridflow;

grid::Network const& ieee30() {
    static grid::Network const net = grid::load_matpower_case(std::filesystem::path(GRIDFLOW_DATA_DIR) / "ieee30.m");
    return net;
}

void BM_BuildYbus(benchmark::State& state) {
    auto const& net = ieee30();
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid::build_ybus(net));
    }
}
BENCHMARK(BM_BuildYbus);

void BM_Jacobian(benchmark::State& state) {
    auto const& net = ieee30();
    auto const y = grid::build_ybus(net);
    auto const kinds = pf::bus_kinds(net);
    auto const s = pf::nr_solve(net).state;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pf::build_jacobian(y, s, kinds));
    }
}
BENCHMARK(BM_Jacobian);

void BM_NewtonRaphsonFlatStart(benchmark::State& state) {
    auto const& net = ieee30();
    auto const y = grid::build_ybus(net);
    for (auto _ : state) {
        auto sol = pf::nr_solve(net, y);
        benchmark::DoNotOptimize(sol);
    }
}
BENCHMARK(BM_NewtonRaphsonFlatStart)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
