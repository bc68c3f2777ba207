#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gridflow::cli {

struct SolveArgs {
    std::filesystem::path case_path;
    double tolerance = 1e-8;
    int max_iterations = 50;
    bool compact = false;
};

struct GenerateArgs {
    std::filesystem::path case_path;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> load_range{-0.4, 0.4};
    double topology_fraction = 0.05;
    unsigned workers = 1;
    std::filesystem::path out;
    bool force = false;
};

struct TrainArgs {
    std::filesystem::path dataset;
    std::string model = "ggnn";
    std::filesystem::path config;  // empty: defaults
    bool edge_weights = false;
    unsigned workers = 1;
    std::filesystem::path out;
    bool force = false;
};

struct EvalArgs {
    std::filesystem::path checkpoint;
    std::filesystem::path dataset;
    std::string split = "test";
    std::string name;  // model id in reports; defaults to the architecture
    std::vector<double> v_bounds{0.94, 1.06};
    std::vector<double> theta_bounds{-0.6, 0.6};
    unsigned workers = 1;
    std::filesystem::path out;
    bool force = false;
};

struct RankArgs {
    std::vector<std::filesystem::path> eval_dirs;
    std::vector<std::string> metrics{"mse", "rmse", "mae", "r2"};
    std::string channel = "combined";
    std::filesystem::path out;
    bool force = false;
};

void run_solve(SolveArgs const& args);
void run_generate(GenerateArgs const& args);
void run_train(TrainArgs const& args);
void run_eval(EvalArgs const& args);
void run_rank(RankArgs const& args);

}  // namespace gridflow::cli
