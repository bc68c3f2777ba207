#include "gridflow/metrics/ranking.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "gridflow/common/error.hpp"

namespace gridflow::metrics {

char const* to_string(Metric m) {
    switch (m) {
        case Metric::MSE: return "mse";
        case Metric::RMSE: return "rmse";
        case Metric::MAE: return "mae";
        case Metric::NRMSE: return "nrmse";
        case Metric::R2: return "r2";
    }
    return "?";
}

Metric metric_from_string(std::string_view s) {
    for (Metric m : {Metric::MSE, Metric::RMSE, Metric::MAE, Metric::NRMSE, Metric::R2}) {
        if (s == to_string(m)) return m;
    }
    throw ValidationError("unknown metric '" + std::string(s) + "'");
}

bool lower_is_better(Metric m) { return m != Metric::R2; }

void MetricTable::set(std::string const& model, std::string const& system, Metric metric, double value) {
    cells_[{model, system, metric}] = value;
}

std::vector<std::string> MetricTable::models() const {
    std::set<std::string> s;
    for (auto const& [key, v] : cells_) s.insert(std::get<0>(key));
    return {s.begin(), s.end()};
}

std::vector<std::string> MetricTable::systems() const {
    std::set<std::string> s;
    for (auto const& [key, v] : cells_) s.insert(std::get<1>(key));
    return {s.begin(), s.end()};
}

std::vector<Metric> MetricTable::metrics() const {
    std::set<Metric> s;
    for (auto const& [key, v] : cells_) s.insert(std::get<2>(key));
    return {s.begin(), s.end()};
}

double const* MetricTable::find(std::string const& model, std::string const& system, Metric metric) const {
    auto it = cells_.find({model, system, metric});
    return it == cells_.end() ? nullptr : &it->second;
}

RankTable rank_models(MetricTable const& table) {
    RankTable out;
    out.models = table.models();
    for (auto const& system : table.systems()) {
        for (Metric metric : table.metrics()) {
            out.columns.push_back({system, metric});
        }
    }
    std::size_t const m = out.models.size();
    out.ranks.assign(m, std::vector<double>(out.columns.size(), 0.0));

    for (std::size_t c = 0; c < out.columns.size(); ++c) {
        auto const& col = out.columns[c];
        std::vector<double> values(m);
        for (std::size_t i = 0; i < m; ++i) {
            double const* v = table.find(out.models[i], col.system, col.metric);
            if (v == nullptr) {
                throw ValidationError("missing metric cell (model " + out.models[i] + ", system " + col.system +
                                      ", metric " + to_string(col.metric) + ")");
            }
            values[i] = lower_is_better(col.metric) ? *v : -*v;
        }
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
        for (std::size_t k = 0; k < m;) {
            std::size_t j = k;
            while (j + 1 < m && values[order[j + 1]] == values[order[k]]) ++j;
            double const rank = (static_cast<double>(k + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t q = k; q <= j; ++q) out.ranks[order[q]][c] = rank;
            k = j + 1;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        double const total = std::accumulate(out.ranks[i].begin(), out.ranks[i].end(), 0.0);
        out.total.push_back(total);
        out.average.push_back(out.columns.empty() ? 0.0 : total / static_cast<double>(out.columns.size()));
    }
    return out;
}

}  // namespace gridflow::metrics
