#include "gridflow/metrics/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "gridflow/common/error.hpp"

namespace gridflow::metrics {

namespace {

std::string real(double v) { return fmt::format("{:.17g}", v); }

std::string real(std::optional<double> const& v) { return v ? real(*v) : std::string("NA"); }

std::vector<std::string> split_csv_line(std::string const& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_real(std::string const& s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("metrics.csv line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

void write_file(std::filesystem::path const& path, std::string const& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace

std::string metrics_csv(std::vector<MetricsRecord> const& records) {
    std::string out = "model,system,channel,n_points,mse,rmse,mae,nrmse,r_squared\n";
    for (auto const& r : records) {
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.model, r.system, to_string(r.channel), r.n_points,
                           real(r.mse), real(r.rmse), real(r.mae), real(r.nrmse), real(r.r_squared));
    }
    return out;
}

std::vector<MetricsRecord> parse_metrics_csv(std::string const& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<MetricsRecord> out;
    if (!std::getline(in, line) || line != "model,system,channel,n_points,mse,rmse,mae,nrmse,r_squared") {
        throw ValidationError("metrics.csv: unexpected header");
    }
    for (std::size_t no = 2; std::getline(in, line); ++no) {
        if (line.empty()) continue;
        auto const cells = split_csv_line(line);
        if (cells.size() != 9) {
            throw ValidationError("metrics.csv line " + std::to_string(no) + ": expected 9 columns");
        }
        MetricsRecord r;
        r.model = cells[0];
        r.system = cells[1];
        r.channel = channel_from_string(cells[2]);
        r.n_points = static_cast<std::size_t>(parse_real(cells[3], no));
        r.mse = parse_real(cells[4], no);
        r.rmse = parse_real(cells[5], no);
        r.mae = parse_real(cells[6], no);
        if (cells[7] != "NA") r.nrmse = parse_real(cells[7], no);
        if (cells[8] != "NA") r.r_squared = parse_real(cells[8], no);
        out.push_back(std::move(r));
    }
    return out;
}

std::string ranks_csv(std::optional<RankTable> const& ranks) {
    std::string out = "model";
    if (ranks) {
        for (auto const& c : ranks->columns) {
            out += fmt::format(",{}/{}", c.system, to_string(c.metric));
        }
    }
    out += ",total,average\n";
    if (ranks) {
        for (std::size_t i = 0; i < ranks->models.size(); ++i) {
            out += ranks->models[i];
            for (double r : ranks->ranks[i]) out += "," + real(r);
            out += "," + real(ranks->total[i]) + "," + real(ranks->average[i]) + "\n";
        }
    }
    return out;
}

std::string scatter_csv(std::vector<ScatterRow> const& rows) {
    std::string out = "bus_id,sample_id,channel,actual,predicted,abs_error\n";
    for (auto const& r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", r.bus_id, r.sample_id, to_string(r.channel), real(r.actual),
                           real(r.predicted), real(r.abs_error));
    }
    return out;
}

nlohmann::json to_json(MetricsRecord const& r) {
    auto opt = [](std::optional<double> const& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"model", r.model}, {"system", r.system},      {"channel", to_string(r.channel)},
            {"n_points", r.n_points}, {"mse", r.mse},    {"rmse", r.rmse},
            {"mae", r.mae},     {"nrmse", opt(r.nrmse)}, {"r_squared", opt(r.r_squared)}};
}

void write_report(Report const& report, std::filesystem::path const& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    write_file(dir / "metrics.csv", metrics_csv(report.records));
    write_file(dir / "ranks.csv", ranks_csv(report.ranks));
    write_file(dir / "scatter.csv", scatter_csv(report.scatter));

    nlohmann::json summary = report.summary;
    auto& recs = summary["records"] = nlohmann::json::array();
    for (auto const& r : report.records) recs.push_back(to_json(r));
    if (report.ranks) {
        auto& ranks = summary["ranks"] = nlohmann::json::object();
        for (std::size_t i = 0; i < report.ranks->models.size(); ++i) {
            ranks[report.ranks->models[i]] = {{"total", report.ranks->total[i]},
                                              {"average", report.ranks->average[i]}};
        }
    }
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace gridflow::metrics
