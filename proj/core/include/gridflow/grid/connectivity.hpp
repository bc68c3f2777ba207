#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gridflow/grid/network.hpp"

namespace gridflow::grid {

struct Components {
    // Each component lists its bus indices in ascending order; components are
    // ordered by their smallest bus index.
    std::vector<std::vector<std::size_t>> groups;
    // Component holding the slack bus, if the network has one.
    std::optional<std::size_t> slack_component;

    bool connected() const { return groups.size() <= 1; }
};

// Connected components over in-service branches.
Components check_connectivity(Network const& net);

}  // namespace gridflow::grid
