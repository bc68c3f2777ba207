#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "gridflow/autodiff/tensor.hpp"

namespace gridflow::train {

// Global L2 norm over every entry of every tensor.
double global_norm(std::vector<ad::Tensor> const& grads);

// Scales all gradients by clip_norm / norm when the global norm exceeds
// clip_norm. Returns the norm before clipping.
double clip_gradients(std::vector<ad::Tensor>& grads, double clip_norm);

struct AdamState {
    std::vector<ad::Tensor> m;
    std::vector<ad::Tensor> v;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    bool operator==(AdamState const&) const = default;
};

AdamState adam_init(std::vector<ad::Tensor> const& params);

// Classic L2: g <- g + weight_decay * w is fed to the bias-corrected Adam
// moments. An empty gradient tensor counts as zero.
void adam_step(std::vector<ad::Tensor>& params, std::vector<ad::Tensor> const& grads, AdamState& state, double lr,
               double weight_decay);

// Halves (by `factor`) the learning rate after `patience` consecutive epochs
// without an improvement larger than `threshold`, never below min_lr.
class PlateauScheduler {
  public:
    PlateauScheduler(double lr, double factor, int patience, double min_lr, double threshold = 1e-8);

    // Records one epoch's validation loss and returns the (possibly reduced) rate.
    double step(double val_loss);
    double lr() const { return lr_; }
    int stalled_epochs() const { return stall_; }

  private:
    double lr_;
    double factor_;
    int patience_;
    double min_lr_;
    double threshold_;
    double best_ = std::numeric_limits<double>::infinity();
    int stall_ = 0;
};

// Patience-based stopping. The best epoch is the one with the lowest loss so
// far; the patience counter only resets on an improvement larger than
// `threshold`.
class EarlyStopping {
  public:
    explicit EarlyStopping(std::int64_t patience, double threshold = 1e-8);

    // Records an epoch's validation loss. Returns true when training should stop.
    bool update(std::int64_t epoch, double val_loss);
    // True when the last update produced a new best loss.
    bool improved() const { return improved_; }
    std::int64_t best_epoch() const { return best_epoch_; }
    double best_loss() const { return best_; }

  private:
    std::int64_t patience_;
    double threshold_;
    double best_ = std::numeric_limits<double>::infinity();
    double reference_ = std::numeric_limits<double>::infinity();
    std::int64_t best_epoch_ = 0;
    std::int64_t since_ = 0;
    bool improved_ = false;
};

}  // namespace gridflow::train
