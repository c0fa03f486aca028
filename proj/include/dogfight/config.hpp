#pragma once

// Run configuration: flat `key = value` text grouped in [sections].
//
//   [run]
//   seed = 7
//   iterations = 50
//
// Every field has a default; unknown sections or keys are rejected.

#include <string>

#include "dogfight/selfplay.hpp"

namespace dogfight {

struct RunConfig {
    std::string out_dir = "run";
    SelfPlayConfig selfplay;

    /// Reduced protocol used for the win/loss/draw trend: 50 iterations,
    /// batch 1024, 12 opponents x 3 games.
    static RunConfig reduced();
    /// Pipeline-liveness profile: 10 iterations, batch 256, 4 opponents.
    static RunConfig smoke();

    void validate() const { selfplay.validate(); }
};

/// Overlays `text` onto `base`. Throws ConfigError with the line number on any
/// syntax error, unknown key or unparsable value.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

/// 16 hex digits of FNV-1a over serialize_config(c).
std::string config_hash(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace dogfight
