#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridflow/models/model.hpp"
#include "gridflow/scenario/graph_sample.hpp"

namespace gridflow::metrics {

enum class Channel { Magnitude, Angle, Combined };

char const* to_string(Channel c);
Channel channel_from_string(std::string_view s);

struct MetricsRecord {
    std::string model;
    std::string system;
    Channel channel = Channel::Combined;
    std::size_t n_points = 0;
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> nrmse;      // empty when the target range is zero
    std::optional<double> r_squared;  // empty when the target variance is zero

    bool operator==(MetricsRecord const&) const = default;
};

// Throws PreconditionError unless both sequences have the same length >= 2.
MetricsRecord compute_metrics(std::span<double const> predicted, std::span<double const> actual);

// Flattens |V| and/or theta of every (prediction, sample) pair, in order,
// magnitudes before angles for the combined channel.
struct ChannelData {
    std::vector<double> predicted;
    std::vector<double> actual;
};
ChannelData channel_data(std::span<models::Prediction const> preds,
                         std::span<scenario::GraphSample const* const> samples, Channel channel);

struct Bounds {
    double low;
    double high;
};

inline constexpr Bounds kMagnitudeBounds{0.94, 1.06};
inline constexpr Bounds kAngleBounds{-0.6, 0.6};

// Fraction of entries outside [low, high]. ConfigError unless low < high.
double out_of_bound_rate(std::span<double const> values, Bounds bounds);

}  // namespace gridflow::metrics
