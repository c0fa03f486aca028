#pragma once

// Best-first search over a handful of actions sampled from the policy's
// Gaussian. Each expanded node draws `num_actions` candidate actions, weights
// them by the softmax of their log-densities (the prior P) and tracks visit
// count N, total value W and mean value Q per candidate. The opponent is part
// of the environment model and plays its policy mean.

#include <functional>
#include <memory>
#include <vector>

#include "dogfight/environment.hpp"
#include "dogfight/nn.hpp"

namespace dogfight {

struct SearchConfig {
    std::size_t num_actions = 9;
    std::size_t num_simulations = 20;
    double c_puct = 1.25;
    int max_depth = 5;

    void validate() const;
    friend bool operator==(const SearchConfig&, const SearchConfig&) = default;
};

struct SearchNode;

struct ChildEdge {
    ActionCommand action{};
    double log_prob = 0.0;
    double prior = 0.0;
    std::int64_t visits = 0;  // N
    double total_value = 0.0;  // W
    double mean_value = 0.0;   // Q
    std::unique_ptr<SearchNode> node;
};

struct SearchNode {
    EngagementState state;
    int depth = 0;
    bool expanded = false;
    bool terminal = false;
    double value = 0.0;  // terminal outcome or leaf evaluation
    ActionCommand opponent_action{};
    std::vector<ChildEdge> children;

    std::int64_t child_visits() const;
};

/// Value of `state` for `side`, expected in [-1, 1].
using ValueFn = std::function<double(const EngagementState& state, Side side)>;

/// Critic value of the side's observation, clamped to [-1, 1].
ValueFn critic_value_fn(const MlpParams& critic);

struct SearchModel {
    Side side = Side::Blue;
    const MlpParams* actor = nullptr;
    const MlpParams* opponent_actor = nullptr;
    ValueFn value;
    EnvConfig env;
};

/// exp(log_prob_i) / sum_j exp(log_prob_j), computed with the max subtracted.
std::vector<double> softmax_priors(std::span<const double> log_probs);

/// Samples num_actions candidates at the node and sets their priors. Terminal
/// nodes are not expanded. Returns the node's value (terminal outcome or ValueFn).
double expand_node(SearchNode& node, const SearchModel& model, std::size_t num_actions, Rng& rng);

/// Picks the unvisited candidate with the highest prior if there is one,
/// otherwise argmax of Q + c_puct * P * sqrt(sum N) / (1 + N). Ties go to the
/// lowest index.
std::size_t puct_select(const SearchNode& node, double c_puct);

struct PathStep {
    SearchNode* node = nullptr;
    std::size_t child = 0;
};

/// Adds one visit with value v to every edge on the path.
void backup(std::span<const PathStep> path, double v);

struct SearchResult {
    ActionCommand action{};
    double log_prob = 0.0;  // Gaussian log-density of `action` under the searching actor
    double root_value = 0.0;
    std::size_t chosen = 0;
    std::vector<double> priors;
    std::vector<std::int64_t> visits;
    std::unique_ptr<SearchNode> root;  // kept for inspection
};

/// Runs exactly num_simulations simulations from `root_state` and returns the
/// most visited root candidate (ties to the lowest index). Throws ConfigError
/// for a terminal root.
SearchResult run_search(const EngagementState& root_state, const SearchModel& model,
                        const SearchConfig& config, Rng& rng);

}  // namespace dogfight
