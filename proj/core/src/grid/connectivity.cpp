#include "gridflow/grid/connectivity.hpp"

#include <algorithm>
#include <limits>

namespace gridflow::grid {

namespace {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) {
            parent[i] = i;
        }
    }

    std::size_t root(std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }

    void join(std::size_t a, std::size_t b) {
        a = root(a);
        b = root(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

}  // namespace

Components check_connectivity(Network const& net) {
    std::size_t const n = net.size();
    DisjointSets sets(n);
    for (auto const& br : net.branches) {
        if (br.in_service) {
            sets.join(br.from_bus, br.to_bus);
        }
    }

    Components out;
    std::vector<std::size_t> group_of(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t const r = sets.root(i);
        if (group_of[r] == std::numeric_limits<std::size_t>::max()) {
            group_of[r] = out.groups.size();
            out.groups.emplace_back();
        }
        out.groups[group_of[r]].push_back(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (net.buses[i].kind == BusKind::Slack) {
            out.slack_component = group_of[sets.root(i)];
            break;
        }
    }
    return out;
}

}  // namespace gridflow::grid
