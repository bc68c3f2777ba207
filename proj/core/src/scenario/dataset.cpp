#include "gridflow/scenario/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include "gridflow/common/error.hpp"
#include "gridflow/common/log.hpp"
#include "gridflow/common/rng.hpp"
#include "gridflow/grid/ybus.hpp"
#include "gridflow/pf/newton_raphson.hpp"

namespace gridflow::scenario {

void validate(ScenarioConfig const& cfg) {
    if (!(cfg.load_low > -1.0) || !(cfg.load_low <= cfg.load_high)) {
        throw ConfigError("load range must satisfy -1 < low <= high");
    }
    if (!(cfg.topology_fraction >= 0.0 && cfg.topology_fraction <= 1.0)) {
        throw ConfigError("topology_fraction must lie in [0, 1]");
    }
    if (cfg.samples < 1) {
        throw ConfigError("samples must be positive");
    }
    if (!(cfg.tap_step > 0.0) || cfg.tap_max_steps < 0) {
        throw ConfigError("tap_step must be positive and tap_max_steps non-negative");
    }
    if (!(cfg.v_min < cfg.v_max)) {
        throw ConfigError("voltage band must satisfy v_min < v_max");
    }
    if (cfg.discard_window < 1) {
        throw ConfigError("discard_window must be positive");
    }
}

char const* to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

Split split_from_string(std::string_view s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw ValidationError("unknown split tag '" + std::string(s) + "'");
}

double NormStats::normalize(std::size_t column, double value) const {
    if (exempt[column]) {
        return value;
    }
    if (constant[column]) {
        return value - mean[column];
    }
    return (value - mean[column]) / std[column];
}

NormStats compute_norm_stats(std::vector<GraphSample> const& samples, std::vector<std::size_t> const& indices) {
    NormStats stats;
    for (std::size_t c = kIsPQ; c < kFeatureCount; ++c) {
        stats.exempt[c] = true;
        stats.mean[c] = 0.0;
        stats.std[c] = 1.0;
    }
    for (std::size_t c = 0; c < kIsPQ; ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (auto idx : indices) {
            auto const& s = samples[idx];
            for (std::size_t i = 0; i < s.num_nodes; ++i) {
                sum += s.feature(i, c);
                ++count;
            }
        }
        double const mean = count ? sum / static_cast<double>(count) : 0.0;
        double sq = 0.0;
        for (auto idx : indices) {
            auto const& s = samples[idx];
            for (std::size_t i = 0; i < s.num_nodes; ++i) {
                double const d = s.feature(i, c) - mean;
                sq += d * d;
            }
        }
        double const sd = count ? std::sqrt(sq / static_cast<double>(count)) : 0.0;
        stats.mean[c] = mean;
        stats.std[c] = sd;
        stats.constant[c] = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
    }
    return stats;
}

std::vector<double> normalize_features(GraphSample const& sample, NormStats const& stats) {
    std::vector<double> out(sample.node_features.size());
    for (std::size_t i = 0; i < sample.num_nodes; ++i) {
        for (std::size_t c = 0; c < kFeatureCount; ++c) {
            out[i * kFeatureCount + c] = stats.normalize(c, sample.feature(i, c));
        }
    }
    return out;
}

std::vector<std::size_t> Dataset::indices(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < split_assignment.size(); ++k) {
        if (split_assignment[k] == split) {
            out.push_back(k);
        }
    }
    return out;
}

namespace {

enum class Outcome { Accepted, NonConverged, OutOfBand, TopologyFailure };

struct ScenarioResult {
    Outcome outcome = Outcome::NonConverged;
    std::optional<GraphSample> sample;
};

ScenarioResult run_scenario(grid::Network const& base, ScenarioConfig const& cfg, std::uint64_t counter) {
    Rng rng(derive_seed(cfg.seed, counter));
    grid::Network net = perturb_loads(base, rng, cfg.load_low, cfg.load_high);
    TopologyChange change;
    if (rng.uniform() < cfg.topology_fraction) {
        try {
            auto perturbed = sample_topology_perturbation(std::move(net), rng, cfg.tap_step, cfg.tap_max_steps);
            net = std::move(perturbed.net);
            change = perturbed.change;
        } catch (GenerationError const&) {
            return {Outcome::TopologyFailure, std::nullopt};
        }
    }

    pf::PFSolution sol;
    try {
        sol = pf::nr_solve(net);
    } catch (SolverError const&) {
        return {Outcome::NonConverged, std::nullopt};
    }
    if (!sol.converged) {
        return {Outcome::NonConverged, std::nullopt};
    }
    for (double v : sol.state.v) {
        if (!(v > cfg.v_min && v < cfg.v_max)) {
            return {Outcome::OutOfBand, std::nullopt};
        }
    }
    GraphSample sample = build_graph_sample(net, sol);
    sample.scenario_id = counter;
    sample.topology = change;
    sample.topology_perturbed = change.kind != TopologyChange::Kind::None;
    return {Outcome::Accepted, std::move(sample)};
}

}  // namespace

Dataset generate_dataset(grid::Network const& base, ScenarioConfig const& cfg, unsigned workers) {
    validate(cfg);
    grid::validate(base);
    workers = std::max(1u, workers);

    Dataset ds;
    ds.base = base;
    ds.config = cfg;
    auto const target = static_cast<std::size_t>(cfg.samples);
    ds.samples.reserve(target);

    std::int64_t window_discards = 0;
    std::uint64_t next_counter = 0;
    std::size_t const block = std::max<std::size_t>(64, 16 * workers);
    std::vector<ScenarioResult> results;

    while (ds.samples.size() < target) {
        results.assign(block, {});
        auto solve_range = [&](unsigned worker) {
            for (std::size_t k = worker; k < block; k += workers) {
                results[k] = run_scenario(base, cfg, next_counter + k);
            }
        };
        if (workers == 1) {
            solve_range(0);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back(solve_range, w);
            }
        }

        for (std::size_t k = 0; k < block && ds.samples.size() < target; ++k) {
            auto& r = results[k];
            std::uint64_t const counter = next_counter + k;
            if (counter % static_cast<std::uint64_t>(cfg.discard_window) == 0) {
                window_discards = 0;
            }
            ++ds.stats.scenarios;
            switch (r.outcome) {
                case Outcome::Accepted: ds.samples.push_back(std::move(*r.sample)); continue;
                case Outcome::NonConverged: ++ds.stats.non_converged; break;
                case Outcome::OutOfBand: ++ds.stats.out_of_band; break;
                case Outcome::TopologyFailure: ++ds.stats.topology_failures; break;
            }
            ++ds.stats.discarded;
            if (++window_discards * 2 > cfg.discard_window) {
                throw GenerationError("discarded " + std::to_string(window_discards) + " of the last " +
                                      std::to_string(counter % static_cast<std::uint64_t>(cfg.discard_window) + 1) +
                                      " scenarios (window " + std::to_string(cfg.discard_window) +
                                      "); the load range or topology settings are likely miscalibrated");
            }
        }
        next_counter += block;
        log::debug("generated " + std::to_string(ds.samples.size()) + "/" + std::to_string(target) + " samples");
    }
    return ds;
}

namespace {

std::size_t round_half_even(double x) {
    double const fl = std::floor(x);
    double const frac = x - fl;
    if (std::abs(frac - 0.5) < 1e-9) {
        auto const base = static_cast<std::size_t>(fl);
        return base % 2 == 0 ? base : base + 1;
    }
    return static_cast<std::size_t>(std::llround(x));
}

}  // namespace

std::array<std::size_t, 3> split_sizes(std::size_t n, Fractions const& f) {
    if (f.train < 0.0 || f.val < 0.0 || f.test < 0.0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
        throw ConfigError("split fractions must be non-negative and sum to 1");
    }
    auto const nd = static_cast<double>(n);
    std::size_t const cut_train = std::min(n, round_half_even(nd * f.train));
    std::size_t const cut_val = std::clamp(round_half_even(nd * (f.train + f.val)), cut_train, n);
    return {cut_train, cut_val - cut_train, n - cut_val};
}

void split_dataset(Dataset& ds, Fractions const& fractions, std::uint64_t seed) {
    std::size_t const n = ds.samples.size();
    auto const sizes = split_sizes(n, fractions);
    for (std::size_t k = 0; k < 3; ++k) {
        if (sizes[k] == 0) {
            throw ConfigError(std::string("empty ") + to_string(static_cast<Split>(k)) + " split for " +
                              std::to_string(n) + " samples");
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) {
        order[k] = k;
    }
    Rng rng(derive_seed(seed, 0x5B1173ULL));
    for (std::size_t k = n; k > 1; --k) {
        auto const j = static_cast<std::size_t>(rng.below(k));
        std::swap(order[k - 1], order[j]);
    }

    ds.split_assignment.assign(n, Split::Test);
    for (std::size_t k = 0; k < sizes[0]; ++k) {
        ds.split_assignment[order[k]] = Split::Train;
    }
    for (std::size_t k = sizes[0]; k < sizes[0] + sizes[1]; ++k) {
        ds.split_assignment[order[k]] = Split::Val;
    }
    ds.split_seed = seed;
    ds.norm_stats = compute_norm_stats(ds.samples, ds.indices(Split::Train));
}

}  // namespace gridflow::scenario
