#include "gridflow/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "gridflow/common/error.hpp"

namespace gridflow::metrics {

char const* to_string(Channel c) {
    switch (c) {
        case Channel::Magnitude: return "magnitude";
        case Channel::Angle: return "angle";
        case Channel::Combined: return "combined";
    }
    return "?";
}

Channel channel_from_string(std::string_view s) {
    if (s == "magnitude") return Channel::Magnitude;
    if (s == "angle") return Channel::Angle;
    if (s == "combined") return Channel::Combined;
    throw ValidationError("unknown channel '" + std::string(s) + "'");
}

MetricsRecord compute_metrics(std::span<double const> predicted, std::span<double const> actual) {
    if (predicted.size() != actual.size()) {
        throw PreconditionError("compute_metrics: " + std::to_string(predicted.size()) + " predictions for " +
                                std::to_string(actual.size()) + " targets");
    }
    std::size_t const n = actual.size();
    if (n < 2) {
        throw PreconditionError("compute_metrics: need at least 2 points");
    }
    double sq = 0.0;
    double abs = 0.0;
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double const e = predicted[k] - actual[k];
        sq += e * e;
        abs += std::abs(e);
        mean += actual[k];
    }
    double const dn = static_cast<double>(n);
    mean /= dn;
    double ss_tot = 0.0;
    for (double y : actual) {
        ss_tot += (y - mean) * (y - mean);
    }
    auto const [lo, hi] = std::minmax_element(actual.begin(), actual.end());

    MetricsRecord r;
    r.n_points = n;
    r.mse = sq / dn;
    r.rmse = std::sqrt(r.mse);
    r.mae = abs / dn;
    if (*hi > *lo) {
        r.nrmse = r.rmse / (*hi - *lo);
    }
    if (ss_tot > 0.0) {
        r.r_squared = 1.0 - sq / ss_tot;
    }
    return r;
}

ChannelData channel_data(std::span<models::Prediction const> preds,
                         std::span<scenario::GraphSample const* const> samples, Channel channel) {
    if (preds.size() != samples.size()) {
        throw PreconditionError("channel_data: " + std::to_string(preds.size()) + " predictions for " +
                                std::to_string(samples.size()) + " samples");
    }
    ChannelData d;
    auto append = [&](bool magnitude) {
        for (std::size_t s = 0; s < preds.size(); ++s) {
            auto const& p = preds[s];
            auto const& t = *samples[s];
            if (p.size() != t.num_nodes) {
                throw PreconditionError("channel_data: prediction size does not match sample " +
                                        std::to_string(t.scenario_id));
            }
            for (std::size_t i = 0; i < t.num_nodes; ++i) {
                d.predicted.push_back(magnitude ? p.v_hat[i] : p.theta_hat[i]);
                d.actual.push_back(magnitude ? t.v_target(i) : t.theta_target(i));
            }
        }
    };
    if (channel != Channel::Angle) append(true);
    if (channel != Channel::Magnitude) append(false);
    return d;
}

double out_of_bound_rate(std::span<double const> values, Bounds bounds) {
    if (!(bounds.low < bounds.high)) {
        throw ConfigError("out_of_bound_rate: low bound must be below high bound");
    }
    if (values.empty()) {
        return 0.0;
    }
    auto const outside = std::count_if(values.begin(), values.end(),
                                       [&](double v) { return v < bounds.low || v > bounds.high; });
    return static_cast<double>(outside) / static_cast<double>(values.size());
}

}  // namespace gridflow::metrics
