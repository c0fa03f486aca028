#include "dogfight/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

namespace dogfight {

namespace {

// Seeds are stored through the size_t alternative.
static_assert(std::is_same_v<std::size_t, std::uint64_t>);
using FieldRef = std::variant<double*, int*, std::size_t*, bool*, std::string*>;

struct Field {
    const char* section;
    const char* key;
    FieldRef ref;
};

std::vector<Field> fields_of(RunConfig& c) {
    SelfPlayConfig& s = c.selfplay;
    TrainConfig& t = s.train;
    SearchConfig& q = s.search;
    ScenarioConfig& sc = s.scenario;
    EnvConfig& e = s.env;
    MissileParams& m = s.env.missile;
    return {
        {"run", "seed", &s.seed},
        {"run", "iterations", &s.iterations},
        {"run", "out_dir", &c.out_dir},
        {"run", "use_mcts", &s.use_mcts},
        {"run", "eval_opponents", &s.eval_opponents},
        {"run", "games_per_opponent", &s.games_per_opponent},
        {"train", "gamma", &t.gamma},
        {"train", "gae_lambda", &t.gae_lambda},
        {"train", "clip_epsilon", &t.clip_epsilon},
        {"train", "epochs", &t.epochs},
        {"train", "batch_size", &t.batch_size},
        {"train", "actor_lr", &t.actor_lr},
        {"train", "critic_lr", &t.critic_lr},
        {"train", "entropy_coeff", &t.entropy_coeff},
        {"search", "num_actions", &q.num_actions},
        {"search", "num_simulations", &q.num_simulations},
        {"search", "c_puct", &q.c_puct},
        {"search", "max_depth", &q.max_depth},
        {"scenario", "speed_min", &sc.speed.lo},
        {"scenario", "speed_max", &sc.speed.hi},
        {"scenario", "altitude_min", &sc.altitude.lo},
        {"scenario", "altitude_max", &sc.altitude.hi},
        {"scenario", "separation_min", &sc.separation.lo},
        {"scenario", "separation_max", &sc.separation.hi},
        {"env", "physics_dt", &e.physics_dt},
        {"env", "decision_dt", &e.decision_dt},
        {"env", "max_time", &e.max_time},
        {"missile", "p0", &m.p0},
        {"missile", "g0", &m.g0},
        {"missile", "gt", &m.gt},
        {"missile", "tw", &m.tw},
        {"missile", "rho", &m.rho},
        {"missile", "sm", &m.sm},
        {"missile", "cdm", &m.cdm},
        {"missile", "k_pn", &m.k_pn},
        {"missile", "max_flight_time", &m.max_flight_time},
        {"missile", "hit_radius", &m.hit_radius},
        {"missile", "min_speed", &m.min_speed},
        {"missile", "command_limit", &m.command_limit},
    };
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool assign(const FieldRef& ref, const std::string& value) {
    return std::visit(
        [&value](auto* p) -> bool {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>) {
                *p = value;
                return true;
            } else if constexpr (std::is_same_v<T, bool>) {
                if (value == "true" || value == "1") *p = true;
                else if (value == "false" || value == "0") *p = false;
                else return false;
                return true;
            } else if constexpr (std::is_same_v<T, double>) {
                // from_chars for double is available in libstdc++ 11.
                double d = 0.0;
                if (!parse_number(value, d) || !std::isfinite(d)) return false;
                *p = d;
                return true;
            } else {
                return parse_number(value, *p);
            }
        },
        ref);
}

std::string format_value(const FieldRef& ref) {
    return std::visit(
        [](auto* p) -> std::string {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return *p;
            } else if constexpr (std::is_same_v<T, bool>) {
                return *p ? "true" : "false";
            } else if constexpr (std::is_same_v<T, double>) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", *p);
                return buf;
            } else {
                return std::to_string(*p);
            }
        },
        ref);
}

}  // namespace

RunConfig RunConfig::reduced() {
    RunConfig c;
    c.selfplay.iterations = 50;
    c.selfplay.train.batch_size = 1024;
    c.selfplay.eval_opponents = 12;
    return c;
}

RunConfig RunConfig::smoke() {
    RunConfig c;
    c.selfplay.iterations = 10;
    c.selfplay.train.batch_size = 256;
    c.selfplay.eval_opponents = 4;
    return c;
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    auto fields = fields_of(base);
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        std::string s = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (s.empty()) continue;
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(where + "unterminated section header");
            section = trim(std::string_view(s).substr(1, s.size() - 2));
            bool known = false;
            for (const auto& f : fields) known = known || section == f.section;
            if (!known) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(std::string_view(s).substr(0, eq));
        const std::string value = trim(std::string_view(s).substr(eq + 1));
        if (section.empty()) throw ConfigError(where + "key '" + key + "' outside of a section");
        bool found = false;
        for (const auto& f : fields) {
            if (section == f.section && key == f.key) {
                if (!assign(f.ref, value))
                    throw ConfigError(where + "bad value '" + value + "' for " + section + "." + key);
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& c) {
    RunConfig copy = c;
    std::string out;
    std::string section;
    for (const auto& f : fields_of(copy)) {
        if (section != f.section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += std::string(f.key) + " = " + format_value(f.ref) + "\n";
    }
    return out;
}

std::string config_hash(const RunConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize_config(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

}  // namespace dogfight
