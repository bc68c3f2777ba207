#pragma once

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace gridflow::metrics {

enum class Metric { MSE, RMSE, MAE, NRMSE, R2 };

char const* to_string(Metric m);
Metric metric_from_string(std::string_view s);
bool lower_is_better(Metric m);

// Metric values keyed by (model, system, metric).
class MetricTable {
  public:
    void set(std::string const& model, std::string const& system, Metric metric, double value);

    std::vector<std::string> models() const;   // sorted, unique
    std::vector<std::string> systems() const;  // sorted, unique
    std::vector<Metric> metrics() const;       // enum order, unique
    double const* find(std::string const& model, std::string const& system, Metric metric) const;

  private:
    std::map<std::tuple<std::string, std::string, Metric>, double> cells_;
};

struct RankColumn {
    std::string system;
    Metric metric;
};

struct RankTable {
    std::vector<std::string> models;
    std::vector<RankColumn> columns;
    std::vector<std::vector<double>> ranks;  // [model][column]; ties share the mean rank
    std::vector<double> total;
    std::vector<double> average;  // total / column count
};

// Ranks every (system, metric) column of the table. Throws ValidationError
// naming the first missing (model, system, metric) cell.
RankTable rank_models(MetricTable const& table);

}  // namespace gridflow::metrics
