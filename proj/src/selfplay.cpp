#include "dogfight/selfplay.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace dogfight {

Agent Agent::random(std::uint64_t seed) {
    return {init_params(derive_seed(seed, 0xac7), actor_layer_sizes(), true),
            init_params(derive_seed(seed, 0xc1c), critic_layer_sizes(), false)};
}

namespace {

std::uint64_t agent_hash(const Agent& a) {
    return mix64(params_hash(a.actor)) ^ params_hash(a.critic);
}

MatchOutcome outcome_for(Outcome o, Side side) {
    const double v = outcome_value(o, side);
    return v > 0.0 ? MatchOutcome::Win : v < 0.0 ? MatchOutcome::Loss : MatchOutcome::Draw;
}

}  // namespace

void AgentCheckpoint::seal() { content_hash = agent_hash(agent); }

bool AgentCheckpoint::verify() const { return content_hash == agent_hash(agent); }

std::string_view to_string(MatchOutcome o) {
    switch (o) {
        case MatchOutcome::Win: return "Win";
        case MatchOutcome::Loss: return "Loss";
        case MatchOutcome::Draw: return "Draw";
    }
    return "?";
}

MatchResult play_match(const Agent& a, const Agent& b, const MatchOptions& options, std::uint64_t seed,
                       bool collect_a, const SubstepHook& hook) {
    options.search.validate();
    EngagementState state = reset(seed, options.scenario);
    if (options.a_side == Side::Red) state = state.swapped();
    const Side side_a = options.a_side;
    const Side side_b = opponent_of(side_a);

    Rng rng_a(derive_seed(seed, 0xa));
    Rng rng_b(derive_seed(seed, 0xb));
    const SearchModel model_a{side_a, &a.actor, &b.actor, critic_value_fn(a.critic), options.env};
    const SearchModel model_b{side_b, &b.actor, &a.actor, critic_value_fn(b.critic), options.env};

    auto decide = [&](const Agent& agent, const SearchModel& model, bool use_mcts, Rng& rng) {
        if (use_mcts) {
            const SearchResult r = run_search(state, model, options.search, rng);
            return SampledAction{r.action, r.log_prob};
        }
        return sample_and_logprob(agent.actor, observe(state, model.side), rng);
    };

    MatchResult result;
    std::int64_t decisions = 0;
    while (!state.done()) {
        const Observation obs_a = observe(state, side_a);
        const SampledAction act_a = decide(a, model_a, options.mcts_a, rng_a);
        const SampledAction act_b = decide(b, model_b, options.mcts_b, rng_b);
        const double value_a = collect_a ? critic_value(a.critic, obs_a) : 0.0;
        const StepResult step = side_a == Side::Blue
                                    ? env_step(state, act_a.action, act_b.action, options.env, hook)
                                    : env_step(state, act_b.action, act_a.action, options.env, hook);
        ++decisions;
        if (collect_a) {
            Transition t;
            t.obs = obs_a;
            t.action = act_a.action;
            t.log_prob = act_a.log_prob;
            t.reward = step.reward_for(side_a);
            t.value = value_a;
            t.done = step.done;
            result.a_transitions.push_back(t);
        }
    }
    result.record.outcome = outcome_for(state.outcome, side_a);
    result.record.decisions = decisions;
    result.record.sim_seconds = state.t;
    result.record.seed = seed;
    result.final_state = state;
    return result;
}

void SelfPlayConfig::validate() const {
    if (iterations < 1) throw ConfigError("iterations must be positive");
    if (eval_opponents < 1) throw ConfigError("eval_opponents must be positive");
    if (games_per_opponent < 1) throw ConfigError("games_per_opponent must be positive");
    train.validate();
    search.validate();
    scenario.validate();
    env.missile.validate();
}

IterationMetrics evaluate_vs_past(const AgentCheckpoint& current, std::span<const AgentCheckpoint> pool,
                                  const SelfPlayConfig& config, Rng& rng, std::vector<MatchRecord>* records) {
    if (pool.empty()) throw ConfigError("evaluate_vs_past: empty checkpoint pool");

    std::vector<std::size_t> chosen(pool.size());
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    if (pool.size() > config.eval_opponents) {
        std::shuffle(chosen.begin(), chosen.end(), rng.engine());
        chosen.resize(config.eval_opponents);
    }

    struct Game {
        std::size_t opponent;
        int index;
        std::uint64_t seed;
    };
    std::vector<Game> games;
    for (std::size_t opp : chosen)
        for (int g = 0; g < config.games_per_opponent; ++g) games.push_back({opp, g, rng.next_u64()});

    MatchOptions options;
    options.mcts_a = config.use_mcts;
    options.mcts_b = config.use_mcts;
    options.search = config.search;
    options.scenario = config.scenario;
    options.env = config.env;

    std::vector<MatchRecord> played(games.size());
    const auto n = static_cast<std::int64_t>(games.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        const Game& g = games[i];
        MatchRecord r = play_match(current.agent, pool[g.opponent].agent, options, g.seed).record;
        r.iteration = current.iteration;
        r.opponent_iteration = pool[g.opponent].iteration;
        r.game_index = g.index;
        played[i] = r;
    }

    IterationMetrics m;
    m.iteration = current.iteration;
    for (const MatchRecord& r : played) {
        if (r.outcome == MatchOutcome::Win) ++m.wins;
        else if (r.outcome == MatchOutcome::Loss) ++m.losses;
        else ++m.draws;
        m.eval_sim_seconds += r.sim_seconds;
    }
    if (records) records->insert(records->end(), played.begin(), played.end());
    return m;
}

RolloutBuffer collect_rollouts(const Agent& agent, const Agent& opponent, const SelfPlayConfig& config,
                               std::size_t min_transitions, std::uint64_t seed) {
    MatchOptions options;
    options.mcts_a = config.use_mcts;
    options.mcts_b = false;
    options.search = config.search;
    options.scenario = config.scenario;
    options.env = config.env;

    RolloutBuffer buffer;
    for (std::uint64_t episode = 0; buffer.size() < min_transitions; ++episode) {
        MatchResult r = play_match(agent, opponent, options, derive_seed(seed, episode), true);
        const double z = outcome_value(r.final_state.outcome, options.a_side);
        buffer.append_episode(std::move(r.a_transitions), z);
    }
    return buffer;
}

TrainLoopResult train_loop(const SelfPlayConfig& config, const std::string& config_hash,
                           const TrainLoopHooks& hooks) {
    config.validate();
    TrainLoopResult out;

    AgentCheckpoint initial;
    initial.iteration = 0;
    initial.agent = Agent::random(derive_seed(config.seed, 0x1a17));
    initial.seed = config.seed;
    initial.config_hash = config_hash;
    initial.seal();
    out.pool.push_back(initial);

    Learner actor(initial.agent.actor);
    Learner critic(initial.agent.critic);
    Rng train_rng(derive_seed(config.seed, 0x7a1));
    Rng eval_rng(derive_seed(config.seed, 0xe7a));

    for (int it = 1; it <= config.iterations; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        const Agent current{actor.params, critic.params};
        RolloutBuffer buffer = collect_rollouts(current, out.pool.back().agent, config,
                                                config.train.batch_size,
                                                derive_seed(config.seed, 0xc011, static_cast<std::uint64_t>(it)));
        compute_advantages(buffer, config.train);
        const TrainMetrics tm = train_iteration(actor, critic, buffer, config.train, train_rng);

        AgentCheckpoint ckpt;
        ckpt.iteration = it;
        ckpt.agent = Agent{actor.params, critic.params};
        ckpt.seed = config.seed;
        ckpt.config_hash = config_hash;
        ckpt.seal();

        for (const auto& past : out.pool)
            if (!past.verify()) throw Error("checkpoint " + std::to_string(past.iteration) + " was modified");

        std::vector<MatchRecord> records;
        IterationMetrics m = evaluate_vs_past(ckpt, out.pool, config, eval_rng, &records);
        m.train = tm;
        m.transitions = buffer.size();
        m.episodes = buffer.episodes().size();
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        out.pool.push_back(std::move(ckpt));
        out.history.push_back(m);
        if (hooks.on_match)
            for (const auto& r : records) hooks.on_match(r);
        if (hooks.on_iteration) hooks.on_iteration(m, out.pool.back());
    }
    return out;
}

}  // namespace dogfight
