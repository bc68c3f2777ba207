#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridflow/metrics/metrics.hpp"
#include "gridflow/metrics/ranking.hpp"

namespace gridflow::metrics {

struct ScatterRow {
    std::int64_t bus_id = 0;
    std::uint64_t sample_id = 0;
    Channel channel = Channel::Magnitude;
    double actual = 0.0;
    double predicted = 0.0;
    double abs_error = 0.0;
};

struct Report {
    std::vector<MetricsRecord> records;
    std::optional<RankTable> ranks;
    std::vector<ScatterRow> scatter;
    nlohmann::json summary = nlohmann::json::object();  // run metadata merged into summary.json
};

// Reals are written with 17 significant digits; undefined metrics as "NA".
//   metrics.csv  model,system,channel,n_points,mse,rmse,mae,nrmse,r_squared
//   ranks.csv    model,<system>/<metric>...,total,average
//   scatter.csv  bus_id,sample_id,channel,actual,predicted,abs_error
std::string metrics_csv(std::vector<MetricsRecord> const& records);
std::vector<MetricsRecord> parse_metrics_csv(std::string const& text);  // ValidationError on malformed input
std::string ranks_csv(std::optional<RankTable> const& ranks);
std::string scatter_csv(std::vector<ScatterRow> const& rows);

nlohmann::json to_json(MetricsRecord const& r);

// Writes the three CSVs and summary.json into `dir` (created if missing).
// Throws IoError when the destination is not writable.
void write_report(Report const& report, std::filesystem::path const& dir);

}  // namespace gridflow::metrics
