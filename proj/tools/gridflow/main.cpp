#include <iostream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "errors.hpp"
#include "gridflow/common/log.hpp"
#include "gridflow/version.hpp"

namespace {

int report(char const* kind, std::string const& message, int code) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << std::endl;
    return code;
}

// Training frees a whole tape after every batch. With the default threshold
// glibc returns that memory to the kernel each time and faults it back in.
void keep_freed_heap() {
#if defined(__GLIBC__)
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace

int main(int argc, char** argv) {
    using namespace gridflow::cli;
    gridflow::log::init_from_env();
    keep_freed_heap();

    CLI::App app{"AC power flow solving, dataset generation and GNN surrogate training"};
    app.set_version_flag("--version", gridflow::kVersion);
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Newton-Raphson power flow; JSON solution on stdout");
    s->add_option("case", solve.case_path, "MATPOWER case file")->required();
    s->add_option("--tol", solve.tolerance, "Mismatch tolerance (p.u.)")->check(CLI::PositiveNumber);
    s->add_option("--max-iter", solve.max_iterations, "Iteration cap")->check(CLI::PositiveNumber);
    s->add_flag("--json", solve.compact, "Single-line JSON");

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a perturbed-scenario dataset");
    g->add_option("case", gen.case_path, "MATPOWER case file")->required();
    g->add_option("--samples", gen.samples, "Accepted samples to produce")->required()->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "Scenario and split seed")->required();
    g->add_option("--load-range", gen.load_range, "Relative load change bounds LOW HIGH")->expected(2);
    g->add_option("--topology-fraction", gen.topology_fraction, "Share of scenarios with a topology change")
        ->check(CLI::Range(0.0, 1.0));
    g->add_option("--workers", gen.workers, "Parallel solver threads")->check(CLI::PositiveNumber);
    g->add_option("-o,--output", gen.out, "Output directory")->required();
    g->add_flag("--force", gen.force, "Overwrite an existing output directory");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train a surrogate on a dataset");
    t->add_option("dataset", tr.dataset, "Dataset directory")->required();
    t->add_option("--model", tr.model, "ggnn or gcn")->check(CLI::IsMember({"ggnn", "gcn"}));
    t->add_option("--config", tr.config, "TOML or JSON training config");
    t->add_flag("--edge-weights", tr.edge_weights, "Scale GGNN messages by branch admittance magnitude");
    t->add_option("--workers", tr.workers, "Validation threads")->check(CLI::PositiveNumber);
    t->add_option("-o,--output", tr.out, "Output directory")->required();
    t->add_flag("--force", tr.force, "Overwrite an existing output directory");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
    e->add_option("checkpoint", ev.checkpoint, "Checkpoint file")->required();
    e->add_option("dataset", ev.dataset, "Dataset directory")->required();
    e->add_option("--split", ev.split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
    e->add_option("--name", ev.name, "Model id used in reports");
    e->add_option("--v-bounds", ev.v_bounds, "Magnitude bounds LOW HIGH (p.u.)")->expected(2);
    e->add_option("--theta-bounds", ev.theta_bounds, "Angle bounds LOW HIGH (rad)")->expected(2);
    e->add_option("--workers", ev.workers, "Prediction threads")->check(CLI::PositiveNumber);
    e->add_option("-o,--output", ev.out, "Output directory")->required();
    e->add_flag("--force", ev.force, "Overwrite an existing output directory");

    RankArgs rk;
    auto* r = app.add_subcommand("rank", "Rank models across evaluation directories");
    r->add_option("eval_dirs", rk.eval_dirs, "Directories written by eval")->required();
    r->add_option("--metrics", rk.metrics, "Metrics to rank on")
        ->delimiter(',')
        ->check(CLI::IsMember({"mse", "rmse", "mae", "nrmse", "r2"}));
    r->add_option("--channel", rk.channel, "magnitude, angle or combined")
        ->check(CLI::IsMember({"magnitude", "angle", "combined"}));
    r->add_option("-o,--output", rk.out, "Output directory")->required();
    r->add_flag("--force", rk.force, "Overwrite an existing output directory");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& err) {
        return app.exit(err);
    } catch (CLI::CallForAllHelp const& err) {
        return app.exit(err);
    } catch (CLI::CallForVersion const& err) {
        return app.exit(err);
    } catch (CLI::ParseError const& err) {
        return report("usage", err.what(), 2);
    }

    try {
        if (s->parsed()) run_solve(solve);
        if (g->parsed()) run_generate(gen);
        if (t->parsed()) run_train(tr);
        if (e->parsed()) run_eval(ev);
        if (r->parsed()) run_rank(rk);
    } catch (UsageError const& err) {
        return report(err.kind(), err.what(), 2);
    } catch (gridflow::ConfigError const& err) {
        return report(err.kind(), err.what(), 2);
    } catch (gridflow::Error const& err) {
        return report(err.kind(), err.what(), 1);
    } catch (std::exception const& err) {
        return report("internal", err.what(), 1);
    }
    return 0;
}
