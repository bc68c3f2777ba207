#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridflow/models/model.hpp"
#include "gridflow/scenario/dataset.hpp"
#include "gridflow/train/config.hpp"

namespace gridflow::train {

struct EpochRecord {
    std::int64_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double learning_rate = 0.0;  // rate used during the epoch
    double wall_time = 0.0;      // seconds since training started
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::int64_t best_epoch = 0;
    double best_val_loss = 0.0;
    bool stopped_early = false;
    nlohmann::json metadata = nlohmann::json::object();
};

struct TrainResult {
    models::Model model;  // parameters of best_epoch
    TrainHistory history;
};

struct TrainOptions {
    unsigned workers = 1;  // evaluation fan-out; results do not depend on it
    std::function<void(EpochRecord const&)> on_epoch;
};

// Requires non-empty train and val splits. Throws TrainingError on a
// non-finite loss. model_cfg.num_nodes is filled from the dataset for the GCN.
TrainResult train(models::ModelConfig model_cfg, scenario::Dataset const& ds, TrainConfig const& cfg,
                  TrainOptions const& options = {});

// Eval-mode predictions for ds.samples[indices[k]], in order.
std::vector<models::Prediction> predict_samples(models::Model const& model, scenario::Dataset const& ds,
                                                std::vector<std::size_t> const& indices, unsigned workers = 1);

// Mean per-sample MSE over the given samples in eval mode.
double evaluate_mse(models::Model const& model, scenario::Dataset const& ds, std::vector<std::size_t> const& indices,
                    unsigned workers = 1);

// "epoch,train_loss,val_loss,lr" rows with 17 significant digits.
std::string history_csv(TrainHistory const& history);
void write_history_csv(TrainHistory const& history, std::filesystem::path const& path);

}  // namespace gridflow::train
