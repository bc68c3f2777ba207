#include "gridflow/train/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "gridflow/common/error.hpp"
#include "gridflow/common/log.hpp"
#include "gridflow/train/loss.hpp"
#include "gridflow/train/optim.hpp"

namespace gridflow::train {

namespace {

// Evaluation always runs in chunks of this many samples, so results are the
// same for any worker count.
constexpr std::size_t kEvalChunk = 64;

constexpr std::uint64_t kShuffleStream = 0x5A0F;
constexpr std::uint64_t kDropoutStream = 0xD50F;

template <class F>
void for_each_chunk(std::size_t count, unsigned workers, F&& work) {
    std::size_t const chunks = (count + kEvalChunk - 1) / kEvalChunk;
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) work(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks; c = next++) {
                try {
                    work(c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

models::GraphBatch batch_of(scenario::Dataset const& ds, std::vector<std::size_t> const& indices, std::size_t begin,
                            std::size_t end) {
    std::vector<scenario::GraphSample const*> members;
    for (std::size_t k = begin; k < end; ++k) {
        members.push_back(&ds.samples[indices[k]]);
    }
    return models::make_batch(members, ds.norm_stats);
}

}  // namespace

std::vector<models::Prediction> predict_samples(models::Model const& model, scenario::Dataset const& ds,
                                                std::vector<std::size_t> const& indices, unsigned workers) {
    std::vector<models::Prediction> out(indices.size());
    for_each_chunk(indices.size(), workers, [&](std::size_t c) {
        std::size_t const begin = c * kEvalChunk;
        std::size_t const end = std::min(indices.size(), begin + kEvalChunk);
        auto preds = models::predict(model, batch_of(ds, indices, begin, end));
        std::move(preds.begin(), preds.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
    });
    return out;
}

double evaluate_mse(models::Model const& model, scenario::Dataset const& ds, std::vector<std::size_t> const& indices,
                    unsigned workers) {
    if (indices.empty()) {
        throw PreconditionError("evaluate_mse: no samples");
    }
    auto const preds = predict_samples(model, ds, indices, workers);
    double sum = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
        sum += mse_loss(preds[k], ds.samples[indices[k]]);
    }
    return sum / static_cast<double>(indices.size());
}

TrainResult train(models::ModelConfig model_cfg, scenario::Dataset const& ds, TrainConfig const& cfg,
                  TrainOptions const& options) {
    validate(cfg);
    auto const train_idx = ds.indices(scenario::Split::Train);
    auto const val_idx = ds.indices(scenario::Split::Val);
    if (train_idx.empty() || val_idx.empty()) {
        throw PreconditionError("training needs non-empty train and val splits");
    }
    if (model_cfg.arch == models::Arch::GCN) {
        model_cfg.num_nodes = ds.samples[train_idx.front()].num_nodes;
    }
    models::Model model = models::init_model(model_cfg);

    std::vector<PhysicsTerms> physics;
    if (cfg.physics_loss_weight > 0.0) {
        physics.resize(ds.samples.size());
        for (auto idx : train_idx) {
            physics[idx] = physics_terms(ds.base, ds.samples[idx]);
        }
    }

    TrainResult result;
    auto& history = result.history;
    history.metadata = {{"train_config", to_json(cfg)},
                        {"model", models::to_string(model_cfg.arch)},
                        {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}},
                        {"clipping", "global_norm"},
                        {"improvement_threshold", 1e-8},
                        {"dropout", model_cfg.dropout},
                        {"dropout_placement", "readout hidden layer"}};

    AdamState adam = adam_init(model.params.values());
    PlateauScheduler scheduler(cfg.learning_rate, cfg.plateau_factor, static_cast<int>(cfg.plateau_patience),
                               cfg.min_lr);
    models::Model best = model;
    EarlyStopping stopping(cfg.patience);

    auto const start = std::chrono::steady_clock::now();
    auto const batch_size = static_cast<std::size_t>(cfg.batch_size);
    std::vector<std::size_t> order = train_idx;

    for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        auto const e = static_cast<std::uint64_t>(epoch);
        Rng shuffle(derive_seed(derive_seed(cfg.seed, kShuffleStream), e));
        for (std::size_t k = order.size(); k > 1; --k) {
            std::swap(order[k - 1], order[shuffle.below(k)]);
        }
        double const lr = scheduler.lr();
        double loss_sum = 0.0;
        std::uint64_t const dropout_seed = derive_seed(derive_seed(cfg.seed, kDropoutStream), e);

        for (std::size_t begin = 0, b = 0; begin < order.size(); begin += batch_size, ++b) {
            std::size_t const end = std::min(order.size(), begin + batch_size);
            auto const batch = batch_of(ds, order, begin, end);
            ad::Tape tape;
            auto const vars = models::bind_parameters(tape, model.params);
            Rng dropout(derive_seed(dropout_seed, b));
            ad::Var const pred = models::model_forward(tape, model, vars, batch, models::Mode::Train, dropout);
            ad::Var loss = mse_loss(tape, pred, batch);
            if (cfg.physics_loss_weight > 0.0) {
                std::vector<PhysicsTerms const*> terms;
                for (std::size_t k = begin; k < end; ++k) {
                    terms.push_back(&physics[order[k]]);
                }
                loss = tape.add(loss, tape.scale(physics_residual_loss(tape, pred, batch, terms),
                                                 cfg.physics_loss_weight));
            }
            double const value = tape.value(loss)[0];
            if (!std::isfinite(value)) {
                throw TrainingError(fmt::format("non-finite loss {} at epoch {}, batch {}", value, epoch, b + 1));
            }
            loss_sum += value * static_cast<double>(end - begin);

            auto grads = tape.backward(loss).grads;
            clip_gradients(grads, cfg.clip_norm);
            adam_step(model.params.values(), grads, adam, lr, cfg.weight_decay);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(order.size());
        rec.val_loss = evaluate_mse(model, ds, val_idx, options.workers);
        rec.learning_rate = lr;
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!std::isfinite(rec.val_loss)) {
            throw TrainingError(fmt::format("non-finite validation loss at epoch {}", epoch));
        }
        history.epochs.push_back(rec);
        if (options.on_epoch) {
            options.on_epoch(rec);
        }
        log::debug(fmt::format("epoch {} train {:.6e} val {:.6e} lr {:.3e}", epoch, rec.train_loss, rec.val_loss, lr));

        bool const stop = stopping.update(epoch, rec.val_loss);
        if (stopping.improved()) {
            best = model;
        }
        scheduler.step(rec.val_loss);
        if (stop) {
            history.stopped_early = epoch < cfg.max_epochs;
            break;
        }
    }
    history.best_epoch = stopping.best_epoch();
    history.best_val_loss = stopping.best_loss();
    result.model = std::move(best);
    return result;
}

std::string history_csv(TrainHistory const& history) {
    std::string out = "epoch,train_loss,val_loss,lr\n";
    for (auto const& r : history.epochs) {
        out += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", r.epoch, r.train_loss, r.val_loss, r.learning_rate);
    }
    return out;
}

void write_history_csv(TrainHistory const& history, std::filesystem::path const& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << history_csv(history);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace gridflow::train
