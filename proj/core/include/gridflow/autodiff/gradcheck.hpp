#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gridflow/autodiff/tape.hpp"

namespace gridflow::ad {

// Builds a scalar loss on `tape` from parameter handles (slot k = params[k]).
// Must be deterministic in the parameter values.
using LossBuilder = std::function<Var(Tape& tape, std::span<Var const> params)>;

struct GradcheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_param = 0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

// Central differences against backward(); relative error of each entry is
// |a - n| / max(1, |a|, |n|).
GradcheckResult gradcheck(LossBuilder const& loss, std::vector<Tensor> const& params, double step = 1e-5);

}  // namespace gridflow::ad
