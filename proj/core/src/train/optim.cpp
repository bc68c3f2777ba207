#include "gridflow/train/optim.hpp"

#include <algorithm>
#include <cmath>

#include "gridflow/common/error.hpp"

namespace gridflow::train {

double global_norm(std::vector<ad::Tensor> const& grads) {
    double sum = 0.0;
    for (auto const& g : grads) {
        for (double x : g.values()) {
            sum += x * x;
        }
    }
    return std::sqrt(sum);
}

double clip_gradients(std::vector<ad::Tensor>& grads, double clip_norm) {
    if (!(clip_norm > 0.0)) {
        throw ConfigError("clip_norm must be positive");
    }
    double const norm = global_norm(grads);
    if (norm > clip_norm) {
        double const s = clip_norm / norm;
        for (auto& g : grads) {
            for (double& x : g.values()) {
                x *= s;
            }
        }
    }
    return norm;
}

AdamState adam_init(std::vector<ad::Tensor> const& params) {
    AdamState s;
    for (auto const& p : params) {
        s.m.emplace_back(p.rows(), p.cols());
        s.v.emplace_back(p.rows(), p.cols());
    }
    return s;
}

void adam_step(std::vector<ad::Tensor>& params, std::vector<ad::Tensor> const& grads, AdamState& state, double lr,
               double weight_decay) {
    if (grads.size() != params.size() || state.m.size() != params.size()) {
        throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " + std::to_string(state.m.size()) +
                         " moment slots");
    }
    ++state.step;
    double const c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    double const c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t p = 0; p < params.size(); ++p) {
        auto& w = params[p];
        auto const& g = grads[p];
        if (!g.empty() && !g.same_shape(w)) {
            throw ShapeError("adam_step: gradient " + g.shape_string() + " for parameter " + w.shape_string());
        }
        auto& m = state.m[p];
        auto& v = state.v[p];
        for (std::size_t k = 0; k < w.size(); ++k) {
            double const gk = (g.empty() ? 0.0 : g[k]) + weight_decay * w[k];
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * gk;
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * gk * gk;
            double const mhat = m[k] / c1;
            double const vhat = v[k] / c2;
            w[k] -= lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

PlateauScheduler::PlateauScheduler(double lr, double factor, int patience, double min_lr, double threshold)
    : lr_(lr), factor_(factor), patience_(patience), min_lr_(min_lr), threshold_(threshold) {}

double PlateauScheduler::step(double val_loss) {
    if (val_loss < best_ - threshold_) {
        best_ = val_loss;
        stall_ = 0;
        return lr_;
    }
    if (++stall_ >= patience_) {
        lr_ = std::max(min_lr_, lr_ * factor_);
        stall_ = 0;
    }
    return lr_;
}

EarlyStopping::EarlyStopping(std::int64_t patience, double threshold) : patience_(patience), threshold_(threshold) {}

bool EarlyStopping::update(std::int64_t epoch, double val_loss) {
    improved_ = val_loss < best_;
    if (improved_) {
        best_ = val_loss;
        best_epoch_ = epoch;
    }
    if (val_loss < reference_ - threshold_) {
        reference_ = val_loss;
        since_ = 0;
    } else {
        ++since_;
    }
    return since_ >= patience_;
}

}  // namespace gridflow::train
