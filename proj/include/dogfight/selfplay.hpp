#pragma once

// Collect / train / checkpoint / evaluate loop. Each iteration the current
// agent is checkpointed and played against randomly chosen earlier checkpoints.

#include <functional>
#include <string>
#include <vector>

#include "dogfight/mcts.hpp"
#include "dogfight/ppo.hpp"

namespace dogfight {

struct Agent {
    MlpParams actor;
    MlpParams critic;

    static Agent random(std::uint64_t seed);
    friend bool operator==(const Agent&, const Agent&) = default;
};

struct AgentCheckpoint {
    std::int64_t iteration = 0;
    Agent agent;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::uint64_t content_hash = 0;  // over actor and critic tensors, set by seal()

    void seal();
    /// True if the parameters still match content_hash.
    bool verify() const;
};

enum class MatchOutcome : std::uint8_t { Win, Loss, Draw };
std::string_view to_string(MatchOutcome o);

struct MatchRecord {
    std::int64_t iteration = 0;
    std::int64_t opponent_iteration = 0;
    int game_index = 0;
    MatchOutcome outcome = MatchOutcome::Draw;  // for agent a / the current agent
    std::int64_t decisions = 0;                 // episode length in decision steps
    double sim_seconds = 0.0;
    std::uint64_t seed = 0;
};

struct MatchOptions {
    bool mcts_a = false;
    bool mcts_b = false;
    Side a_side = Side::Blue;  // Red mirrors the initial state so agent a starts identically
    SearchConfig search;
    ScenarioConfig scenario;
    EnvConfig env;
};

struct MatchResult {
    MatchRecord record;
    EngagementState final_state;
    std::vector<Transition> a_transitions;  // filled when collect_a is set
};

/// Plays one engagement to termination. Deterministic in (agents, options, seed).
MatchResult play_match(const Agent& a, const Agent& b, const MatchOptions& options, std::uint64_t seed,
                       bool collect_a = false, const SubstepHook& hook = {});

struct SelfPlayConfig {
    std::uint64_t seed = 0;
    int iterations = 50;
    std::size_t eval_opponents = 36;
    int games_per_opponent = 3;
    bool use_mcts = true;
    TrainConfig train;
    SearchConfig search;
    ScenarioConfig scenario;
    EnvConfig env;

    void validate() const;
};

struct IterationMetrics {
    std::int64_t iteration = 0;
    int wins = 0;
    int losses = 0;
    int draws = 0;
    int games() const { return wins + losses + draws; }
    TrainMetrics train;
    std::size_t transitions = 0;
    std::size_t episodes = 0;
    double eval_sim_seconds = 0.0;  // simulated flight time over the evaluation games
    double wall_seconds = 0.0;
};

/// Plays `current` against min(eval_opponents, |pool|) distinct checkpoints drawn
/// from `pool`, games_per_opponent games each. Throws ConfigError on an empty pool.
IterationMetrics evaluate_vs_past(const AgentCheckpoint& current, std::span<const AgentCheckpoint> pool,
                                  const SelfPlayConfig& config, Rng& rng,
                                  std::vector<MatchRecord>* records = nullptr);

/// Plays episodes of `agent` against `opponent` until at least `min_transitions`
/// of the agent's steps are stored.
RolloutBuffer collect_rollouts(const Agent& agent, const Agent& opponent, const SelfPlayConfig& config,
                               std::size_t min_transitions, std::uint64_t seed);

struct TrainLoopHooks {
    std::function<void(const IterationMetrics&, const AgentCheckpoint&)> on_iteration;
    std::function<void(const MatchRecord&)> on_match;
};

struct TrainLoopResult {
    std::vector<AgentCheckpoint> pool;  // [0] is the untrained starting agent
    std::vector<IterationMetrics> history;
};

/// Runs the whole protocol. Deterministic in config.seed.
TrainLoopResult train_loop(const SelfPlayConfig& config, const std::string& config_hash = {},
                           const TrainLoopHooks& hooks = {});

}  // namespace dogfight
