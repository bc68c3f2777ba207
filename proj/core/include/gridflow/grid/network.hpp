#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gridflow::grid {

enum class BusKind { Slack, PV, PQ };

char const* to_string(BusKind kind);

// All electrical quantities are per unit on Network::base_mva; angles in radians.
struct Bus {
    int original_id = 0;  // id as written in the case file
    BusKind kind = BusKind::PQ;
    double p_demand = 0.0;
    double q_demand = 0.0;
    double v_setpoint = 1.0;
    double theta_setpoint = 0.0;
    double shunt_g = 0.0;
    double shunt_b = 0.0;

    bool operator==(Bus const&) const = default;
};

struct Branch {
    std::size_t from_bus = 0;  // internal 0-based indices
    std::size_t to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_charging = 0.0;
    double tap = 1.0;
    double shift = 0.0;
    bool in_service = true;

    bool is_transformer() const { return tap != 1.0 || shift != 0.0; }
    bool operator==(Branch const&) const = default;
};

struct Generator {
    std::size_t bus = 0;
    double p_gen = 0.0;
    double q_gen = 0.0;
    double v_setpoint = 1.0;
    bool in_service = true;

    bool operator==(Generator const&) const = default;
};

struct Network {
    std::string name;
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;

    std::size_t size() const { return buses.size(); }

    // Index of the unique slack bus. Throws ValidationError if there is none.
    std::size_t slack_index() const;

    // Net scheduled generation per bus (sum over in-service generators).
    std::vector<double> scheduled_p_gen() const;
    std::vector<double> scheduled_q_gen() const;

    bool operator==(Network const&) const = default;
};

// Checks the type invariants: exactly one slack bus, positive set-points on
// slack/PV buses, branch endpoints in range, non-zero series impedance,
// positive taps and unique original ids. Throws ValidationError.
void validate(Network const& net);

}  // namespace gridflow::grid
