#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gridflow/grid/network.hpp"

namespace gridflow::grid {

// Parses MATPOWER version-2 case text (mpc.baseMVA, mpc.bus, mpc.gen,
// mpc.branch). Demands, shunts and generation are converted to per unit on
// baseMVA and angles to radians. Other mpc.* fields are skipped with a
// warning. The returned network has been validated.
//
// Throws ParseError (with the 1-based line number) on malformed rows and
// ValidationError when the network violates its invariants.
Network parse_matpower_case(std::string_view text, std::string name = {});

Network load_matpower_case(std::filesystem::path const& path);

// Emits MATPOWER version-2 text. parse_matpower_case(write_matpower_case(n))
// reproduces `n` exactly: every number is written with enough digits that the
// unit conversion on re-parsing lands on the same double.
std::string write_matpower_case(Network const& net);

}  // namespace gridflow::grid
