#include "gridflow/grid/matpower.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "gridflow/common/error.hpp"
#include "gridflow/common/log.hpp"

namespace gridflow::grid {

namespace {

constexpr double deg_to_rad = std::numbers::pi / 180.0;

struct Row {
    std::vector<double> values;
    std::size_t line = 0;
};

struct Table {
    std::vector<Row> rows;
    std::size_t line = 0;
};

std::string_view trim(std::string_view s) {
    auto const first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
    auto const pos = line.find('%');
    return pos == std::string_view::npos ? line : line.substr(0, pos);
}

double parse_number(std::string_view token, std::size_t line) {
    double value = 0.0;
    if (token == "Inf" || token == "inf") {
        return HUGE_VAL;
    }
    if (token == "-Inf" || token == "-inf") {
        return -HUGE_VAL;
    }
    auto const* begin = token.data();
    if (!token.empty() && token.front() == '+') {
        ++begin;
    }
    auto const [ptr, ec] = std::from_chars(begin, token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError("invalid number '" + std::string(token) + "'", line);
    }
    return value;
}

std::vector<double> parse_row(std::string_view text, std::size_t line) {
    std::vector<double> values;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',' || text[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != ',' && text[j] != '\r') {
            ++j;
        }
        if (j > i) {
            values.push_back(parse_number(text.substr(i, j - i), line));
        }
        i = j;
    }
    return values;
}

struct ParsedText {
    std::optional<double> base_mva;
    std::size_t base_line = 0;
    std::unordered_map<std::string, Table> tables;
};

ParsedText scan(std::string_view text) {
    ParsedText out;
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos <= text.size();) {
        auto const next = text.find('\n', pos);
        if (next == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, next - pos));
        pos = next + 1;
    }

    std::string current;  // name of the matrix being read, empty when outside one
    Table* table = nullptr;
    bool skipping = false;
    char close = ']';
    for (std::size_t k = 0; k < lines.size(); ++k) {
        std::size_t const line_no = k + 1;
        std::string_view line = trim(strip_comment(lines[k]));
        if (line.empty()) {
            continue;
        }
        if (current.empty()) {
            if (line.rfind("mpc.", 0) != 0) {
                continue;
            }
            auto const eq = line.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            std::string const field(trim(line.substr(4, eq - 4)));
            std::string_view rhs = trim(line.substr(eq + 1));
            if (field == "version") {
                if (rhs.find('1') != std::string_view::npos && rhs.find('2') == std::string_view::npos) {
                    throw ParseError("MATPOWER version 1 case format is not supported", line_no);
                }
                continue;
            }
            if (field == "baseMVA") {
                if (!rhs.empty() && rhs.back() == ';') {
                    rhs.remove_suffix(1);
                }
                out.base_mva = parse_number(trim(rhs), line_no);
                out.base_line = line_no;
                continue;
            }
            bool const opens_matrix = !rhs.empty() && (rhs.front() == '[' || rhs.front() == '{');
            bool const wanted = field == "bus" || field == "gen" || field == "branch";
            if (!wanted) {
                log::warn("skipping unsupported case field mpc." + field);
            }
            if (!opens_matrix) {
                continue;
            }
            close = rhs.front() == '[' ? ']' : '}';
            current = field;
            skipping = !wanted;
            if (wanted) {
                table = &out.tables[field];
                table->line = line_no;
            }
            line = trim(rhs.substr(1));
            if (line.empty()) {
                continue;
            }
        }

        auto const end = line.find(close);
        std::string_view body = end == std::string_view::npos ? line : line.substr(0, end);
        if (!skipping) {
            std::size_t start = 0;
            while (start <= body.size()) {
                auto const semi = body.find(';', start);
                auto const piece =
                    trim(body.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start));
                if (!piece.empty()) {
                    table->rows.push_back({parse_row(piece, line_no), line_no});
                }
                if (semi == std::string_view::npos) {
                    break;
                }
                start = semi + 1;
            }
        }
        if (end != std::string_view::npos) {
            current.clear();
            table = nullptr;
            skipping = false;
        }
    }
    if (!current.empty()) {
        throw ParseError("unterminated matrix mpc." + current, lines.size());
    }
    return out;
}

Table const& require_table(ParsedText const& parsed, std::string const& name, std::size_t min_columns) {
    auto const it = parsed.tables.find(name);
    if (it == parsed.tables.end()) {
        throw ParseError("missing table mpc." + name, 0);
    }
    Table const& table = it->second;
    std::size_t expected = 0;
    for (auto const& row : table.rows) {
        if (expected == 0) {
            expected = row.values.size();
        }
        if (row.values.size() != expected) {
            throw ParseError("mpc." + name + " row has " + std::to_string(row.values.size()) +
                                 " columns, expected " + std::to_string(expected),
                             row.line);
        }
        if (row.values.size() < min_columns) {
            throw ParseError("mpc." + name + " row has " + std::to_string(row.values.size()) +
                                 " columns, need at least " + std::to_string(min_columns),
                             row.line);
        }
    }
    return table;
}

int as_int(double value, std::size_t line, char const* what) {
    if (value != std::floor(value)) {
        throw ParseError(std::string(what) + " must be an integer", line);
    }
    return static_cast<int>(value);
}

}  // namespace

Network parse_matpower_case(std::string_view text, std::string name) {
    ParsedText const parsed = scan(text);
    if (!parsed.base_mva) {
        throw ParseError("missing mpc.baseMVA", 0);
    }
    if (!(*parsed.base_mva > 0.0)) {
        throw ParseError("mpc.baseMVA must be positive", parsed.base_line);
    }
    Table const& bus_table = require_table(parsed, "bus", 13);
    Table const& gen_table = require_table(parsed, "gen", 8);
    Table const& branch_table = require_table(parsed, "branch", 11);

    Network net;
    net.name = std::move(name);
    net.base_mva = *parsed.base_mva;
    double const base = net.base_mva;

    std::unordered_map<int, std::size_t> index_of;
    for (auto const& row : bus_table.rows) {
        auto const& v = row.values;
        Bus bus;
        bus.original_id = as_int(v[0], row.line, "bus id");
        switch (as_int(v[1], row.line, "bus type")) {
            case 1: bus.kind = BusKind::PQ; break;
            case 2: bus.kind = BusKind::PV; break;
            case 3: bus.kind = BusKind::Slack; break;
            default: throw ParseError("unsupported bus type " + std::to_string(static_cast<int>(v[1])), row.line);
        }
        bus.p_demand = v[2] / base;
        bus.q_demand = v[3] / base;
        bus.shunt_g = v[4] / base;
        bus.shunt_b = v[5] / base;
        bus.v_setpoint = v[7];
        bus.theta_setpoint = v[8] * deg_to_rad;
        if (!index_of.emplace(bus.original_id, net.buses.size()).second) {
            throw ValidationError("duplicate bus id " + std::to_string(bus.original_id));
        }
        net.buses.push_back(bus);
    }

    auto lookup = [&](double id, std::size_t line) {
        auto const it = index_of.find(as_int(id, line, "bus reference"));
        if (it == index_of.end()) {
            throw ParseError("reference to unknown bus " + std::to_string(static_cast<int>(id)), line);
        }
        return it->second;
    };

    std::vector<bool> has_setpoint(net.size(), false);
    for (auto const& row : gen_table.rows) {
        auto const& v = row.values;
        Generator gen;
        gen.bus = lookup(v[0], row.line);
        gen.p_gen = v[1] / base;
        gen.q_gen = v[2] / base;
        gen.v_setpoint = v[5];
        gen.in_service = v[7] > 0.0;
        if (gen.in_service && !has_setpoint[gen.bus]) {
            has_setpoint[gen.bus] = true;
            if (net.buses[gen.bus].kind != BusKind::PQ) {
                net.buses[gen.bus].v_setpoint = gen.v_setpoint;
            }
        }
        net.generators.push_back(gen);
    }

    for (auto const& row : branch_table.rows) {
        auto const& v = row.values;
        Branch br;
        br.from_bus = lookup(v[0], row.line);
        br.to_bus = lookup(v[1], row.line);
        br.r = v[2];
        br.x = v[3];
        br.b_charging = v[4];
        br.tap = v[8] == 0.0 ? 1.0 : v[8];
        br.shift = v[9] * deg_to_rad;
        br.in_service = v[10] > 0.0;
        net.branches.push_back(br);
    }

    validate(net);
    return net;
}

Network load_matpower_case(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open case file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_matpower_case(buffer.str(), path.stem().string());
}

namespace {

// Finds a decimal rendering of `to_file(value)` whose image under `from_file`
// is exactly `value`.
template <class To, class From>
std::string exact(double value, To to_file, From from_file) {
    double const target = to_file(value);
    char buf[64];
    auto render = [&](double x) {
        auto const [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, ptr);
    };
    if (from_file(target) == value) {
        return render(target);
    }
    double up = target;
    double down = target;
    for (int step = 0; step < 16; ++step) {
        up = std::nextafter(up, HUGE_VAL);
        if (from_file(up) == value) {
            return render(up);
        }
        down = std::nextafter(down, -HUGE_VAL);
        if (from_file(down) == value) {
            return render(down);
        }
    }
    return render(target);
}

std::string plain(double value) {
    char buf[64];
    auto const [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

}  // namespace

std::string write_matpower_case(Network const& net) {
    double const base = net.base_mva;
    auto mw = [&](double pu) {
        return exact(pu, [&](double x) { return x * base; }, [&](double x) { return x / base; });
    };
    auto deg = [](double rad) {
        return exact(rad, [](double x) { return x / deg_to_rad; }, [](double x) { return x * deg_to_rad; });
    };

    std::ostringstream out;
    out << "function mpc = " << (net.name.empty() ? std::string("case") : net.name) << "\n\n";
    out << "%% MATPOWER Case Format : Version 2\n";
    out << "mpc.version = '2';\n\n";
    out << "mpc.baseMVA = " << plain(base) << ";\n\n";

    out << "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin\n";
    out << "mpc.bus = [\n";
    for (auto const& bus : net.buses) {
        int const type = bus.kind == BusKind::Slack ? 3 : bus.kind == BusKind::PV ? 2 : 1;
        out << '\t' << bus.original_id << '\t' << type << '\t' << mw(bus.p_demand) << '\t' << mw(bus.q_demand)
            << '\t' << mw(bus.shunt_g) << '\t' << mw(bus.shunt_b) << "\t1\t" << plain(bus.v_setpoint) << '\t'
            << deg(bus.theta_setpoint) << "\t0\t1\t0\t0;\n";
    }
    out << "];\n\n";

    out << "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin\n";
    out << "mpc.gen = [\n";
    for (auto const& gen : net.generators) {
        out << '\t' << net.buses[gen.bus].original_id << '\t' << mw(gen.p_gen) << '\t' << mw(gen.q_gen)
            << "\t0\t0\t" << plain(gen.v_setpoint) << '\t' << plain(base) << '\t' << (gen.in_service ? 1 : 0)
            << "\t0\t0;\n";
    }
    out << "];\n\n";

    out << "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax\n";
    out << "mpc.branch = [\n";
    for (auto const& br : net.branches) {
        out << '\t' << net.buses[br.from_bus].original_id << '\t' << net.buses[br.to_bus].original_id << '\t'
            << plain(br.r) << '\t' << plain(br.x) << '\t' << plain(br.b_charging) << "\t0\t0\t0\t" << plain(br.tap)
            << '\t' << deg(br.shift) << '\t' << (br.in_service ? 1 : 0) << "\t-360\t360;\n";
    }
    out << "];\n";
    return out.str();
}

}  // namespace gridflow::grid
