#include "gridflow/pf/solution_json.hpp"

#include "gridflow/common/error.hpp"

namespace gridflow::pf {

nlohmann::json to_json(PFSolution const& sol) {
    return {{"converged", sol.converged},   {"iterations", sol.iterations}, {"max_mismatch", sol.max_mismatch},
            {"diverged", sol.diverged},     {"slack_p", sol.slack_p},       {"slack_q", sol.slack_q},
            {"v", sol.state.v},             {"theta", sol.state.theta}};
}

PFSolution solution_from_json(nlohmann::json const& j) {
    try {
        PFSolution sol;
        sol.converged = j.at("converged").get<bool>();
        sol.iterations = j.at("iterations").get<int>();
        sol.max_mismatch = j.at("max_mismatch").get<double>();
        sol.diverged = j.value("diverged", false);
        sol.slack_p = j.at("slack_p").get<double>();
        sol.slack_q = j.at("slack_q").get<double>();
        sol.state.v = j.at("v").get<std::vector<double>>();
        sol.state.theta = j.at("theta").get<std::vector<double>>();
        return sol;
    } catch (nlohmann::json::exception const& e) {
        throw ValidationError(std::string("malformed solution JSON: ") + e.what());
    }
}

}  // namespace gridflow::pf
