#include "gridflow/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace gridflow::ad {

namespace {

double evaluate(LossBuilder const& loss, std::vector<Tensor> const& params, GradientMap* grads) {
    Tape tape;
    std::vector<Var> handles;
    handles.reserve(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        handles.push_back(tape.parameter(params[k], k));
    }
    Var const out = loss(tape, handles);
    if (grads != nullptr) {
        *grads = tape.backward(out);
    }
    return tape.value(out)[0];
}

}  // namespace

GradcheckResult gradcheck(LossBuilder const& loss, std::vector<Tensor> const& params, double step) {
    GradientMap grads;
    evaluate(loss, params, &grads);

    GradcheckResult result;
    std::vector<Tensor> probe = params;
    for (std::size_t p = 0; p < params.size(); ++p) {
        for (std::size_t k = 0; k < params[p].size(); ++k) {
            double const x = params[p][k];
            probe[p][k] = x + step;
            double const up = evaluate(loss, probe, nullptr);
            probe[p][k] = x - step;
            double const down = evaluate(loss, probe, nullptr);
            probe[p][k] = x;

            double const numeric = (up - down) / (2.0 * step);
            double const analytic = grads.grads[p].empty() ? 0.0 : grads.grads[p][k];
            double const denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
            double const err = std::abs(analytic - numeric) / denom;
            if (err > result.max_rel_error || std::isnan(err)) {
                result = {err, p, k, analytic, numeric};
            }
        }
    }
    return result;
}

}  // namespace gridflow::ad
