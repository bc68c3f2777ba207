#include "gridflow/train/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "gridflow/common/error.hpp"

namespace gridflow::train {

void validate(TrainConfig const& c) {
    if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(c.min_lr >= 0.0)) throw ConfigError("min_lr must be non-negative");
    if (!(c.learning_rate > c.min_lr)) throw ConfigError("learning_rate must exceed min_lr");
    if (!(c.weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
    if (c.batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (c.max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
    if (c.patience < 1) throw ConfigError("patience must be at least 1");
    if (!(c.clip_norm > 0.0)) throw ConfigError("clip_norm must be positive");
    if (!(c.plateau_factor > 0.0 && c.plateau_factor < 1.0)) throw ConfigError("plateau_factor must lie in (0, 1)");
    if (c.plateau_patience < 1) throw ConfigError("plateau_patience must be at least 1");
    if (!(c.physics_loss_weight >= 0.0)) throw ConfigError("physics_loss_weight must be non-negative");
}

nlohmann::json to_json(TrainConfig const& c) {
    return {{"learning_rate", c.learning_rate},
            {"weight_decay", c.weight_decay},
            {"batch_size", c.batch_size},
            {"max_epochs", c.max_epochs},
            {"patience", c.patience},
            {"clip_norm", c.clip_norm},
            {"plateau_factor", c.plateau_factor},
            {"plateau_patience", c.plateau_patience},
            {"min_lr", c.min_lr},
            {"seed", c.seed},
            {"physics_loss_weight", c.physics_loss_weight}};
}

namespace {

template <class T>
void read(nlohmann::json const& j, char const* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) {
        return;
    }
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!it->is_number()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ConfigError("");
        } else {
            if (!it->is_number_integer()) throw ConfigError("");
            if constexpr (std::is_unsigned_v<T>) {
                if (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0)
                    throw ConfigError("");
            }
        }
        out = it->get<T>();
    } catch (std::exception const&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

void reject_unknown(nlohmann::json const& j, std::set<std::string> const& known, std::string const& where) {
    for (auto const& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

}  // namespace

RunConfig run_config_from_json(nlohmann::json const& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be an object");
    }
    reject_unknown(j,
                   {"learning_rate", "weight_decay", "batch_size", "max_epochs", "patience", "clip_norm",
                    "plateau_factor", "plateau_patience", "min_lr", "seed", "physics_loss_weight", "model"},
                   "");
    RunConfig rc;
    auto& t = rc.train;
    read(j, "learning_rate", t.learning_rate);
    read(j, "weight_decay", t.weight_decay);
    read(j, "batch_size", t.batch_size);
    read(j, "max_epochs", t.max_epochs);
    read(j, "patience", t.patience);
    read(j, "clip_norm", t.clip_norm);
    read(j, "plateau_factor", t.plateau_factor);
    read(j, "plateau_patience", t.plateau_patience);
    read(j, "min_lr", t.min_lr);
    read(j, "seed", t.seed);
    read(j, "physics_loss_weight", t.physics_loss_weight);
    validate(t);

    if (auto it = j.find("model"); it != j.end()) {
        if (!it->is_object()) {
            throw ConfigError("config key 'model' must be a table");
        }
        reject_unknown(*it, {"hidden", "steps", "readout_hidden", "dropout", "edge_weights", "gcn_width", "gcn_head"},
                       "model.");
        auto& m = rc.model;
        read(*it, "hidden", m.hidden);
        read(*it, "steps", m.steps);
        read(*it, "readout_hidden", m.readout_hidden);
        read(*it, "dropout", m.dropout);
        read(*it, "edge_weights", m.edge_weights);
        read(*it, "gcn_width", m.gcn_width);
        read(*it, "gcn_head", m.gcn_head);
    }
    rc.model.seed = t.seed;
    return rc;
}

namespace {

std::string_view trim(std::string_view s) {
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
    bool quoted = false;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '"' && (k == 0 || s[k - 1] != '\\')) quoted = !quoted;
        if (s[k] == '#' && !quoted) return s.substr(0, k);
    }
    return s;
}

bool bare_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    }
    return true;
}

nlohmann::json parse_value(std::string_view v, std::size_t line) {
    auto fail = [&](std::string const& what) -> ConfigError {
        return ConfigError("line " + std::to_string(line) + ": " + what);
    };
    if (v.empty()) throw fail("missing value");
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw fail("unterminated string");
        std::string out;
        for (std::size_t k = 1; k + 1 < v.size(); ++k) {
            if (v[k] == '\\' && k + 2 < v.size()) {
                char const e = v[++k];
                out.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
            } else {
                out.push_back(v[k]);
            }
        }
        return out;
    }
    std::string num;
    for (char c : v) {
        if (c != '_') num.push_back(c);
    }
    if (!num.empty() && num.front() == '+') num.erase(0, 1);
    bool const is_float = num.find_first_of(".eE") != std::string::npos;
    char const* first = num.data();
    char const* last = num.data() + num.size();
    if (is_float) {
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, d);
        if (ec != std::errc() || ptr != last) throw fail("invalid number '" + std::string(v) + "'");
        return d;
    }
    if (!num.empty() && num.front() == '-') {
        std::int64_t i = 0;
        auto [ptr, ec] = std::from_chars(first, last, i);
        if (ec != std::errc() || ptr != last) throw fail("invalid integer '" + std::string(v) + "'");
        return i;
    }
    std::uint64_t u = 0;
    auto [ptr, ec] = std::from_chars(first, last, u);
    if (ec != std::errc() || ptr != last) throw fail("invalid value '" + std::string(v) + "'");
    return u;
}

}  // namespace

nlohmann::json parse_toml(std::string_view text) {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const end = std::min(text.find('\n', pos), text.size());
        std::string_view const line = trim(strip_comment(text.substr(pos, end - pos)));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed table header");
            auto const name = trim(line.substr(1, line.size() - 2));
            if (!bare_key(name)) throw ConfigError("line " + std::to_string(line_no) + ": invalid table name");
            if (root.contains(std::string(name))) {
                throw ConfigError("line " + std::to_string(line_no) + ": duplicate table '" + std::string(name) + "'");
            }
            table = &(root[std::string(name)] = nlohmann::json::object());
            continue;
        }
        auto const eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        auto const key = trim(line.substr(0, eq));
        if (!bare_key(key)) throw ConfigError("line " + std::to_string(line_no) + ": invalid key");
        if (table->contains(std::string(key))) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        (*table)[std::string(key)] = parse_value(trim(line.substr(eq + 1)), line_no);
    }
    return root;
}

RunConfig load_run_config(std::filesystem::path const& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::string const text = ss.str();
    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (nlohmann::json::parse_error const& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
        return run_config_from_json(j);
    }
    return run_config_from_json(parse_toml(text));
}

}  // namespace gridflow::train
