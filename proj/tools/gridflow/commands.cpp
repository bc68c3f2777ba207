#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "errors.hpp"
#include "gridflow/common/log.hpp"
#include "gridflow/grid/matpower.hpp"
#include "gridflow/metrics/metrics.hpp"
#include "gridflow/metrics/ranking.hpp"
#include "gridflow/metrics/report.hpp"
#include "gridflow/models/checkpoint.hpp"
#include "gridflow/pf/newton_raphson.hpp"
#include "gridflow/pf/solution_json.hpp"
#include "gridflow/scenario/dataset_io.hpp"
#include "gridflow/train/config.hpp"
#include "gridflow/train/trainer.hpp"
#include "manifest.hpp"

namespace gridflow::cli {

namespace fs = std::filesystem;

namespace {

void require_file(fs::path const& p) {
    if (!fs::is_regular_file(p)) {
        throw UsageError("no such file: " + p.string());
    }
}

void require_dir(fs::path const& p) {
    if (!fs::is_directory(p)) {
        throw UsageError("no such directory: " + p.string());
    }
}

void write_text(fs::path const& path, std::string const& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

std::string read_text(fs::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void run_solve(SolveArgs const& args) {
    require_file(args.case_path);
    auto const net = grid::load_matpower_case(args.case_path);
    pf::NrOptions opts;
    opts.tolerance = args.tolerance;
    opts.max_iterations = args.max_iterations;
    auto const sol = pf::nr_solve(net, opts);
    auto const j = pf::to_json(sol);
    std::cout << (args.compact ? j.dump() : j.dump(2)) << "\n";
    if (!sol.converged) {
        throw SolverError(fmt::format("did not converge, max mismatch {:.3e}", sol.max_mismatch), sol.iterations);
    }
}

void run_generate(GenerateArgs const& args) {
    require_file(args.case_path);
    if (args.load_range.size() != 2) {
        throw UsageError("--load-range takes two values");
    }
    RunManifest manifest;
    scenario::ScenarioConfig cfg;
    cfg.samples = args.samples;
    cfg.seed = args.seed;
    cfg.load_low = args.load_range[0];
    cfg.load_high = args.load_range[1];
    cfg.topology_fraction = args.topology_fraction;
    scenario::validate(cfg);

    auto const net = grid::load_matpower_case(args.case_path);
    prepare_output_dir(args.out, args.force);
    auto ds = scenario::generate_dataset(net, cfg, args.workers);
    scenario::split_dataset(ds, {}, cfg.seed);
    scenario::write_dataset(ds, args.out);
    log::info(fmt::format("generated {} samples ({} discarded, {} topology-perturbed)", ds.samples.size(),
                          ds.stats.discarded,
                          std::count_if(ds.samples.begin(), ds.samples.end(),
                                        [](auto const& s) { return s.topology_perturbed; })));

    manifest.command = "generate";
    manifest.config = scenario::to_json(cfg);
    manifest.seeds = {{"scenario", cfg.seed}, {"split", cfg.seed}};
    manifest.inputs = {args.case_path.string()};
    manifest.outputs = {"network.json", "samples.jsonl", "manifest.json"};
    manifest.write(args.out);
}

void run_train(TrainArgs const& args) {
    require_dir(args.dataset);
    train::RunConfig rc;
    if (!args.config.empty()) {
        require_file(args.config);
        rc = train::load_run_config(args.config);
    }
    rc.model.arch = models::arch_from_string(args.model);
    if (args.edge_weights) {
        rc.model.edge_weights = true;
    }
    RunManifest manifest;
    auto const ds = scenario::read_dataset(args.dataset);
    prepare_output_dir(args.out, args.force);

    train::TrainOptions opts;
    opts.workers = args.workers;
    opts.on_epoch = [](train::EpochRecord const& r) {
        log::info(fmt::format("epoch {:4d}  train {:.6e}  val {:.6e}  lr {:.3e}", r.epoch, r.train_loss,
                              r.val_loss, r.learning_rate));
    };
    auto const result = train::train(rc.model, ds, rc.train, opts);
    auto const& h = result.history;

    models::Checkpoint ckpt{result.model, ds.norm_stats,
                            {{"best_epoch", h.best_epoch},
                             {"best_val_loss", h.best_val_loss},
                             {"train_config", train::to_json(rc.train)},
                             {"system", ds.base.name}}};
    models::write_checkpoint(ckpt, args.out / "model.ckpt");
    train::write_history_csv(h, args.out / "history.csv");
    nlohmann::json summary = {{"model", args.model},
                              {"system", ds.base.name},
                              {"epochs", h.epochs.size()},
                              {"best_epoch", h.best_epoch},
                              {"best_val_loss", h.best_val_loss},
                              {"stopped_early", h.stopped_early},
                              {"parameters", result.model.params.scalar_count()},
                              {"metadata", h.metadata}};
    write_text(args.out / "summary.json", summary.dump(2) + "\n");

    manifest.command = "train";
    manifest.config = {{"train", train::to_json(rc.train)}, {"model", models::to_json(result.model.config)}};
    manifest.seeds = {{"train", rc.train.seed}};
    manifest.inputs = {args.dataset.string()};
    if (!args.config.empty()) manifest.inputs.push_back(args.config.string());
    manifest.outputs = {"model.ckpt", "history.csv", "summary.json"};
    manifest.write(args.out);
}

void run_eval(EvalArgs const& args) {
    require_file(args.checkpoint);
    require_dir(args.dataset);
    if (args.v_bounds.size() != 2 || args.theta_bounds.size() != 2) {
        throw UsageError("bounds take two values");
    }
    auto const split = scenario::split_from_string(args.split);
    RunManifest manifest;
    auto const ckpt = models::read_checkpoint(args.checkpoint);
    auto ds = scenario::read_dataset(args.dataset);
    if (!(ckpt.norm_stats == ds.norm_stats)) {
        log::warn("checkpoint normalization differs from the dataset's; using the checkpoint's");
        ds.norm_stats = ckpt.norm_stats;
    }
    auto const idx = ds.indices(split);
    if (idx.empty()) {
        throw PreconditionError(std::string("dataset has no ") + scenario::to_string(split) + " samples");
    }
    prepare_output_dir(args.out, args.force);

    auto const preds = train::predict_samples(ckpt.model, ds, idx, args.workers);
    std::vector<scenario::GraphSample const*> samples;
    for (auto k : idx) samples.push_back(&ds.samples[k]);

    std::string const name = args.name.empty() ? models::to_string(ckpt.model.config.arch) : args.name;
    metrics::Report report;
    for (auto ch : {metrics::Channel::Magnitude, metrics::Channel::Angle, metrics::Channel::Combined}) {
        auto const d = metrics::channel_data(preds, samples, ch);
        auto rec = metrics::compute_metrics(d.predicted, d.actual);
        rec.model = name;
        rec.system = ds.base.name;
        rec.channel = ch;
        report.records.push_back(rec);
    }
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (std::size_t i = 0; i < samples[s]->num_nodes; ++i) {
            auto const bus = ds.base.buses[i].original_id;
            auto const id = samples[s]->scenario_id;
            double const v = samples[s]->v_target(i);
            double const t = samples[s]->theta_target(i);
            report.scatter.push_back(
                {bus, id, metrics::Channel::Magnitude, v, preds[s].v_hat[i], std::abs(preds[s].v_hat[i] - v)});
            report.scatter.push_back(
                {bus, id, metrics::Channel::Angle, t, preds[s].theta_hat[i], std::abs(preds[s].theta_hat[i] - t)});
        }
    }
    auto const vm = metrics::channel_data(preds, samples, metrics::Channel::Magnitude);
    auto const va = metrics::channel_data(preds, samples, metrics::Channel::Angle);
    metrics::Bounds const vb{args.v_bounds[0], args.v_bounds[1]};
    metrics::Bounds const tb{args.theta_bounds[0], args.theta_bounds[1]};
    report.summary = {{"model", name},
                      {"system", ds.base.name},
                      {"split", scenario::to_string(split)},
                      {"samples", idx.size()},
                      {"out_of_bound_rate",
                       {{"magnitude", metrics::out_of_bound_rate(vm.predicted, vb)},
                        {"angle", metrics::out_of_bound_rate(va.predicted, tb)}}},
                      {"bounds", {{"magnitude", args.v_bounds}, {"angle", args.theta_bounds}}},
                      {"checkpoint", ckpt.metadata}};
    metrics::write_report(report, args.out);

    manifest.command = "eval";
    manifest.config = {{"split", args.split}, {"name", name}, {"v_bounds", args.v_bounds},
                       {"theta_bounds", args.theta_bounds}};
    manifest.seeds = {{"model", ckpt.model.config.seed}};
    manifest.inputs = {args.checkpoint.string(), args.dataset.string()};
    manifest.outputs = {"metrics.csv", "ranks.csv", "scatter.csv", "summary.json"};
    manifest.write(args.out);
}

void run_rank(RankArgs const& args) {
    auto const channel = metrics::channel_from_string(args.channel);
    std::vector<metrics::Metric> wanted;
    for (auto const& m : args.metrics) wanted.push_back(metrics::metric_from_string(m));

    RunManifest manifest;
    metrics::MetricTable table;
    std::vector<metrics::MetricsRecord> records;
    for (auto const& dir : args.eval_dirs) {
        require_file(dir / "metrics.csv");
        for (auto const& r : metrics::parse_metrics_csv(read_text(dir / "metrics.csv"))) {
            if (r.channel != channel) continue;
            records.push_back(r);
            for (auto m : wanted) {
                std::optional<double> v;
                switch (m) {
                    case metrics::Metric::MSE: v = r.mse; break;
                    case metrics::Metric::RMSE: v = r.rmse; break;
                    case metrics::Metric::MAE: v = r.mae; break;
                    case metrics::Metric::NRMSE: v = r.nrmse; break;
                    case metrics::Metric::R2: v = r.r_squared; break;
                }
                if (!v) {
                    throw ValidationError(fmt::format("{} of model {} on {} is undefined", metrics::to_string(m),
                                                      r.model, r.system));
                }
                if (table.find(r.model, r.system, m) != nullptr) {
                    throw ValidationError(fmt::format("duplicate result for model {} on {}", r.model, r.system));
                }
                table.set(r.model, r.system, m, *v);
            }
        }
    }
    prepare_output_dir(args.out, args.force);
    metrics::Report report;
    report.records = records;
    report.ranks = metrics::rank_models(table);
    report.summary = {{"channel", args.channel}, {"metrics", args.metrics}};
    metrics::write_report(report, args.out);

    manifest.command = "rank";
    manifest.config = {{"channel", args.channel}, {"metrics", args.metrics}};
    for (auto const& d : args.eval_dirs) manifest.inputs.push_back(d.string());
    manifest.outputs = {"metrics.csv", "ranks.csv", "scatter.csv", "summary.json"};
    manifest.write(args.out);
}

}  // namespace gridflow::cli
