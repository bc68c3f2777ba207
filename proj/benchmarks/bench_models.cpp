#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "gridflow/grid/matpower.hpp"
#include "gridflow/models/model.hpp"
#include "gridflow/pf/newton_raphson.hpp"
#include "gridflow/train/loss.hpp"

namespace {

using namespace gridflow;

scenario::GraphSample const& sample30() {
    static scenario::GraphSample const s = [] {
        auto const net = grid::load_matpower_case(std::filesystem::path(GRIDFLOW_DATA_DIR) / "ieee30.m");
        return scenario::build_graph_sample(net, pf::nr_solve(net));
    }();
    return s;
}

// `batch` copies of the 30-bus sample as one disjoint union.
models::GraphBatch batch_of(std::size_t batch) {
    scenario::NormStats stats;
    stats.std.fill(1.0);
    std::vector<scenario::GraphSample const*> members(batch, &sample30());
    return models::make_batch(members, stats);
}

models::Model model_for(models::Arch arch) {
    models::ModelConfig cfg;
    cfg.arch = arch;
    cfg.num_nodes = 30;
    return models::init_model(cfg);
}

void BM_Forward(benchmark::State& state, models::Arch arch) {
    auto const model = model_for(arch);
    auto const batch = batch_of(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(models::predict(model, batch));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_Forward, ggnn, models::Arch::GGNN)->Arg(1)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Forward, gcn, models::Arch::GCN)->Arg(1)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_GgnnTrainStep(benchmark::State& state) {
    auto const model = model_for(models::Arch::GGNN);
    auto const batch = batch_of(static_cast<std::size_t>(state.range(0)));
    Rng rng(1);
    for (auto _ : state) {
        ad::Tape tape;
        auto const params = models::bind_parameters(tape, model.params);
        auto const pred = models::model_forward(tape, model, params, batch, models::Mode::Train, rng);
        auto grads = tape.backward(train::mse_loss(tape, pred, batch));
        benchmark::DoNotOptimize(grads);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GgnnTrainStep)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
