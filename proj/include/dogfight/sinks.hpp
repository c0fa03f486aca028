#pragma once

// Run outputs: per-iteration metrics and per-game records as JSON lines, and
// per-substep flight trajectories as CSV.

#include <fstream>
#include <string>

#include "dogfight/selfplay.hpp"

namespace dogfight {

/// One JSON object per line with keys iter, wins, losses, draws, surrogate,
/// value_loss, entropy, clip_fraction, seconds. `seconds` is the simulated
/// flight time of the evaluation games so reruns with one seed are identical.
std::string metrics_line(const IterationMetrics& m);
std::string match_line(const MatchRecord& r);

class JsonlWriter {
public:
    explicit JsonlWriter(const std::string& path);
    void write(const std::string& line);

private:
    std::ofstream out_;
};

/// Header: t,side,x,y,z,v,gamma,phi,missile_x,missile_y,missile_z,outcome.
/// One row per aircraft per physics substep; missile columns are empty until
/// that side has launched.
class TrajectoryWriter {
public:
    explicit TrajectoryWriter(const std::string& path);
    void write(const EngagementState& s);
    SubstepHook hook() {
        return [this](const EngagementState& s) { write(s); };
    }

private:
    std::ofstream out_;
};

}  // namespace dogfight
