#include "dogfight/sinks.hpp"

#include <cstdio>

#include <json.hpp>

namespace dogfight {

std::string metrics_line(const IterationMetrics& m) {
    nlohmann::ordered_json j;
    j["iter"] = m.iteration;
    j["wins"] = m.wins;
    j["losses"] = m.losses;
    j["draws"] = m.draws;
    j["surrogate"] = m.train.surrogate;
    j["value_loss"] = m.train.value_loss;
    j["entropy"] = m.train.entropy;
    j["clip_fraction"] = m.train.clip_fraction;
    j["seconds"] = m.eval_sim_seconds;
    return j.dump();
}

std::string match_line(const MatchRecord& r) {
    nlohmann::ordered_json j;
    j["iter"] = r.iteration;
    j["opponent"] = r.opponent_iteration;
    j["game"] = r.game_index;
    j["outcome"] = std::string(to_string(r.outcome));
    j["decisions"] = r.decisions;
    j["seconds"] = r.sim_seconds;
    j["seed"] = r.seed;
    return j.dump();
}

JsonlWriter::JsonlWriter(const std::string& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot write " + path);
}

void JsonlWriter::write(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw Error("write failed");
}

TrajectoryWriter::TrajectoryWriter(const std::string& path) : out_(path, std::ios::trunc) {
    if (!out_) throw Error("cannot write " + path);
    out_ << "t,side,x,y,z,v,gamma,phi,missile_x,missile_y,missile_z,outcome\n";
}

void TrajectoryWriter::write(const EngagementState& s) {
    char buf[512];
    for (Side side : {Side::Blue, Side::Red}) {
        const AircraftState& a = s.aircraft(side);
        int n = std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", s.t,
                              std::string(to_string(side)).c_str(), a.x, a.y, a.z, a.v, a.gamma, a.phi);
        out_.write(buf, n);
        if (const auto& m = s.missile(side)) {
            n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", m->xm, m->ym, m->zm);
            out_.write(buf, n);
        } else {
            out_ << ",,,";
        }
        out_ << to_string(s.outcome) << '\n';
    }
    if (!out_) throw Error("trajectory write failed");
}

}  // namespace dogfight
