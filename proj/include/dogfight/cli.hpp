#pragma once

#include <iosfwd>

namespace dogfight {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad arguments or configuration
inline constexpr int kExitRuntime = 2;  // I/O, corrupt checkpoint, failed selfcheck

/// Entry point of the `dogfight` tool:
///   train --config <file> --seed <n> --out <dir> [--no-mcts] [--smoke] [--reduced]
///   eval --a <ckpt> --b <ckpt> --games <n> --seed <n> [--mcts-a] [--mcts-b]
///   replay --ckpt-a <ckpt> --ckpt-b <ckpt> --seed <n> --traj <csv>
///   selfcheck
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dogfight
