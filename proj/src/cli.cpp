#include "dogfight/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "dogfight/checkpoint.hpp"
#include "dogfight/config.hpp"
#include "dogfight/selfcheck.hpp"
#include "dogfight/sinks.hpp"

namespace dogfight {

namespace {

struct TrainArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool no_mcts = false;
    bool smoke = false;
    bool reduced = false;
};

struct EvalArgs {
    std::string a, b;
    int games = 1;
    std::uint64_t seed = 0;
    bool mcts_a = false, mcts_b = false;
    std::string config;
};

struct ReplayArgs {
    std::string a, b;
    std::uint64_t seed = 0;
    std::string traj;
    bool mcts_a = false, mcts_b = false;
    std::string config;
};

RunConfig resolve_train_config(const TrainArgs& args) {
    if (args.smoke && args.reduced) throw ConfigError("--smoke and --reduced are mutually exclusive");
    RunConfig cfg = args.smoke ? RunConfig::smoke() : args.reduced ? RunConfig::reduced() : RunConfig{};
    if (!args.config.empty()) cfg = load_config(args.config, cfg);
    if (args.seed) cfg.selfplay.seed = *args.seed;
    if (!args.out.empty()) cfg.out_dir = args.out;
    if (args.no_mcts) cfg.selfplay.use_mcts = false;
    cfg.validate();
    return cfg;
}

std::string checkpoint_name(std::int64_t iteration) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ckpt_%04lld.dgft", static_cast<long long>(iteration));
    return buf;
}

int do_train(const TrainArgs& args, std::ostream& out) {
    const RunConfig cfg = resolve_train_config(args);
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "config.ini", std::ios::trunc);
        f << serialize_config(cfg);
        if (!f) throw Error("cannot write " + (dir / "config.ini").string());
    }
    JsonlWriter metrics((dir / "metrics.jsonl").string());
    JsonlWriter matches((dir / "matches.jsonl").string());
    JsonlWriter timing((dir / "timing.jsonl").string());

    TrainLoopHooks hooks;
    hooks.on_match = [&](const MatchRecord& r) { matches.write(match_line(r)); };
    hooks.on_iteration = [&](const IterationMetrics& m, const AgentCheckpoint& ckpt) {
        save_checkpoint((dir / checkpoint_name(m.iteration)).string(), ckpt);
        metrics.write(metrics_line(m));
        char buf[96];
        std::snprintf(buf, sizeof buf, "{\"iter\":%lld,\"wall_seconds\":%.3f}",
                      static_cast<long long>(m.iteration), m.wall_seconds);
        timing.write(buf);
        std::snprintf(buf, sizeof buf, "iter %lld: W %d L %d D %d (%.1f s)",
                      static_cast<long long>(m.iteration), m.wins, m.losses, m.draws, m.wall_seconds);
        out << buf << std::endl;
    };
    train_loop(cfg.selfplay, config_hash(cfg), hooks);
    return kExitOk;
}

RunConfig optional_config(const std::string& path) {
    RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
    cfg.validate();
    return cfg;
}

MatchOptions match_options(const RunConfig& cfg, bool mcts_a, bool mcts_b) {
    MatchOptions o;
    o.mcts_a = mcts_a;
    o.mcts_b = mcts_b;
    o.search = cfg.selfplay.search;
    o.scenario = cfg.selfplay.scenario;
    o.env = cfg.selfplay.env;
    return o;
}

int do_eval(const EvalArgs& args, std::ostream& out) {
    if (args.games < 1) throw ConfigError("--games must be at least 1");
    const RunConfig cfg = optional_config(args.config);
    const AgentCheckpoint a = load_checkpoint(args.a);
    const AgentCheckpoint b = load_checkpoint(args.b);
    const MatchOptions options = match_options(cfg, args.mcts_a, args.mcts_b);
    for (int g = 0; g < args.games; ++g) {
        const std::uint64_t seed = derive_seed(args.seed, static_cast<std::uint64_t>(g));
        const MatchResult r = play_match(a.agent, b.agent, options, seed);
        char buf[128];
        std::snprintf(buf, sizeof buf, "game %d: %s (%lld decisions, %.1f s)", g,
                      std::string(to_string(r.record.outcome)).c_str(),
                      static_cast<long long>(r.record.decisions), r.record.sim_seconds);
        out << buf << '\n';
    }
    return kExitOk;
}

int do_replay(const ReplayArgs& args, std::ostream& out) {
    const RunConfig cfg = optional_config(args.config);
    const AgentCheckpoint a = load_checkpoint(args.a);
    const AgentCheckpoint b = load_checkpoint(args.b);
    TrajectoryWriter traj(args.traj);
    const MatchResult r =
        play_match(a.agent, b.agent, match_options(cfg, args.mcts_a, args.mcts_b), args.seed, false, traj.hook());
    out << to_string(r.record.outcome) << '\n';
    return kExitOk;
}

int do_selfcheck(std::ostream& out) {
    bool ok = true;
    for (const auto& c : run_selfcheck()) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        out << '\n';
        ok = ok && c.passed;
    }
    return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Within-visual-range air combat self-play with PPO and MCTS", "dogfight"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "run self-play training");
    train_cmd->add_option("--config", train.config, "configuration file")->check(CLI::ExistingFile);
    train_cmd->add_option("--seed", train.seed, "master seed (overrides the config)");
    train_cmd->add_option("--out", train.out, "output directory (overrides the config)");
    train_cmd->add_flag("--no-mcts", train.no_mcts, "train and evaluate with raw policy actions");
    train_cmd->add_flag("--smoke", train.smoke, "10 iterations, batch 256, 4 evaluation opponents");
    train_cmd->add_flag("--reduced", train.reduced, "50 iterations, batch 1024, 12 evaluation opponents");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "play checkpoint a against checkpoint b");
    eval_cmd->add_option("--a", eval.a, "checkpoint for agent a")->required();
    eval_cmd->add_option("--b", eval.b, "checkpoint for agent b")->required();
    eval_cmd->add_option("--games", eval.games, "number of games")->required();
    eval_cmd->add_option("--seed", eval.seed, "seed")->required();
    eval_cmd->add_flag("--mcts-a", eval.mcts_a, "agent a plans with tree search");
    eval_cmd->add_flag("--mcts-b", eval.mcts_b, "agent b plans with tree search");
    eval_cmd->add_option("--config", eval.config, "configuration file")->check(CLI::ExistingFile);

    ReplayArgs replay;
    auto* replay_cmd = app.add_subcommand("replay", "play one game and write its trajectory");
    replay_cmd->add_option("--ckpt-a", replay.a, "checkpoint for blue")->required();
    replay_cmd->add_option("--ckpt-b", replay.b, "checkpoint for red")->required();
    replay_cmd->add_option("--seed", replay.seed, "seed")->required();
    replay_cmd->add_option("--traj", replay.traj, "trajectory CSV to write")->required();
    replay_cmd->add_flag("--mcts-a", replay.mcts_a, "blue plans with tree search");
    replay_cmd->add_flag("--mcts-b", replay.mcts_b, "red plans with tree search");
    replay_cmd->add_option("--config", replay.config, "configuration file")->check(CLI::ExistingFile);

    auto* selfcheck_cmd = app.add_subcommand("selfcheck", "run the built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*train_cmd) return do_train(train, out);
        if (*eval_cmd) return do_eval(eval, out);
        if (*replay_cmd) return do_replay(replay, out);
        if (*selfcheck_cmd) return do_selfcheck(out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace dogfight
