#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gridflow/grid/network.hpp"
#include "gridflow/scenario/config.hpp"
#include "gridflow/scenario/graph_sample.hpp"

namespace gridflow::scenario {

enum class Split : std::uint8_t { Train, Val, Test };

char const* to_string(Split split);
Split split_from_string(std::string_view s);

// Feature-wise z-score statistics over all nodes of the training split.
// One-hot flag columns are exempt (mean 0, std 1); columns with zero spread
// are flagged constant and normalize to x - mean.
struct NormStats {
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> std{};
    std::array<bool, kFeatureCount> constant{};
    std::array<bool, kFeatureCount> exempt{};

    double normalize(std::size_t column, double value) const;
    bool operator==(NormStats const&) const = default;
};

NormStats compute_norm_stats(std::vector<GraphSample> const& samples, std::vector<std::size_t> const& indices);

// Row-major num_nodes x kFeatureCount normalized features.
std::vector<double> normalize_features(GraphSample const& sample, NormStats const& stats);

struct GenerationStats {
    std::int64_t scenarios = 0;       // scenario counters consumed
    std::int64_t discarded = 0;       // non-converged, out-of-band or failed topology draws
    std::int64_t non_converged = 0;
    std::int64_t out_of_band = 0;
    std::int64_t topology_failures = 0;

    bool operator==(GenerationStats const&) const = default;
};

struct Dataset {
    grid::Network base;
    ScenarioConfig config;
    GenerationStats stats;
    std::vector<GraphSample> samples;
    std::vector<Split> split_assignment;  // empty until split_dataset
    NormStats norm_stats;
    std::uint64_t split_seed = 0;

    std::vector<std::size_t> indices(Split split) const;
    bool operator==(Dataset const&) const = default;
};

struct Fractions {
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
};

// Solves scenarios 0, 1, 2, ... (each with its own derived seed) until
// cfg.samples converged, in-band samples are collected. `workers` threads solve
// scenarios concurrently; results are merged in counter order, so the output
// does not depend on the worker count.
// Throws GenerationError if more than half the scenarios in a window fail.
Dataset generate_dataset(grid::Network const& base, ScenarioConfig const& cfg, unsigned workers = 1);

// Seeded uniform permutation, then contiguous train/val/test blocks with cut
// points round(n * train) and round(n * (train + val)), ties to even.
// Computes norm_stats from the training block. Throws ConfigError on an empty
// split or fractions that do not sum to one.
void split_dataset(Dataset& ds, Fractions const& fractions, std::uint64_t seed);

// Sizes of the (train, val, test) blocks split_dataset produces for n samples.
std::array<std::size_t, 3> split_sizes(std::size_t n, Fractions const& fractions);

}  // namespace gridflow::scenario
