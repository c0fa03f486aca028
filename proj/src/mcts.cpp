#include "dogfight/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dogfight {

void SearchConfig::validate() const {
    if (num_actions < 1) throw ConfigError("num_actions must be >= 1");
    if (num_simulations < 1) throw ConfigError("num_simulations must be >= 1");
    if (!(c_puct >= 0.0)) throw ConfigError("c_puct must be non-negative");
    if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
}

std::int64_t SearchNode::child_visits() const {
    std::int64_t n = 0;
    for (const auto& c : children) n += c.visits;
    return n;
}

ValueFn critic_value_fn(const MlpParams& critic) {
    return [&critic](const EngagementState& s, Side side) {
        return std::clamp(critic_value(critic, observe(s, side)), -1.0, 1.0);
    };
}

std::vector<double> softmax_priors(std::span<const double> log_probs) {
    double max_lp = -std::numeric_limits<double>::infinity();
    for (double lp : log_probs) max_lp = std::max(max_lp, lp);
    std::vector<double> p;
    double z = 0.0;
    for (double lp : log_probs) {
        p.push_back(std::exp(lp - max_lp));
        z += p.back();
    }
    for (double& v : p) v /= z;
    return p;
}

double expand_node(SearchNode& node, const SearchModel& model, std::size_t num_actions, Rng& rng) {
    if (node.state.done()) {
        node.terminal = true;
        node.value = outcome_value(node.state.outcome, model.side);
        return node.value;
    }
    const ActionCommand mean = policy_mean(*model.actor, observe(node.state, model.side));
    node.opponent_action = policy_mean(*model.opponent_actor, observe(node.state, opponent_of(model.side)));

    node.children.clear();
    node.children.resize(num_actions);
    std::vector<double> log_probs;
    for (auto& c : node.children) {
        const SampledAction s = sample_from_mean(mean, model.actor->log_std, rng);
        c.action = s.action;
        c.log_prob = s.log_prob;
        log_probs.push_back(s.log_prob);
    }
    const auto priors = softmax_priors(log_probs);
    for (std::size_t i = 0; i < num_actions; ++i) node.children[i].prior = priors[i];
    node.expanded = true;
    node.value = model.value(node.state, model.side);
    return node.value;
}

std::size_t puct_select(const SearchNode& node, double c_puct) {
    if (!node.expanded || node.children.empty()) throw ConfigError("puct_select: node is not expanded");

    // Unvisited candidates are tried first, highest prior first.
    std::size_t best = node.children.size();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const ChildEdge& c = node.children[i];
        if (c.visits == 0 && (best == node.children.size() || c.prior > node.children[best].prior)) best = i;
    }
    if (best != node.children.size()) return best;

    const double sqrt_total = std::sqrt(static_cast<double>(node.child_visits()));
    best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const ChildEdge& c = node.children[i];
        const double score =
            c.mean_value + c_puct * c.prior * sqrt_total / (1.0 + static_cast<double>(c.visits));
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

void backup(std::span<const PathStep> path, double v) {
    for (const PathStep& step : path) {
        ChildEdge& e = step.node->children[step.child];
        e.visits += 1;
        e.total_value += v;
        e.mean_value = e.total_value / static_cast<double>(e.visits);
    }
}

namespace {

std::unique_ptr<SearchNode> make_child(const SearchNode& parent, const ChildEdge& edge,
                                       const SearchModel& model, const SearchConfig& config,
                                       Rng& rng) {
    auto child = std::make_unique<SearchNode>();
    child->state = parent.state;
    child->depth = parent.depth + 1;
    const bool blue = model.side == Side::Blue;
    env_step(child->state, blue ? edge.action : parent.opponent_action,
             blue ? parent.opponent_action : edge.action, model.env);
    if (child->state.done()) {
        child->terminal = true;
        child->value = outcome_value(child->state.outcome, model.side);
    } else if (child->depth >= config.max_depth) {
        child->value = model.value(child->state, model.side);
    } else {
        expand_node(*child, model, config.num_actions, rng);
    }
    return child;
}

}  // namespace

SearchResult run_search(const EngagementState& root_state, const SearchModel& model,
                        const SearchConfig& config, Rng& rng) {
    config.validate();
    if (root_state.done()) throw ConfigError("run_search: root state is terminal");
    if (!model.actor || !model.opponent_actor || !model.value)
        throw ConfigError("run_search: incomplete search model");

    SearchResult result;
    result.root = std::make_unique<SearchNode>();
    SearchNode& root = *result.root;
    root.state = root_state;
    result.root_value = expand_node(root, model, config.num_actions, rng);

    std::vector<PathStep> path;
    for (std::size_t sim = 0; sim < config.num_simulations; ++sim) {
        path.clear();
        SearchNode* node = &root;
        double leaf_value = 0.0;
        while (true) {
            const std::size_t idx = puct_select(*node, config.c_puct);
            path.push_back({node, idx});
            ChildEdge& edge = node->children[idx];
            if (!edge.node) {
                edge.node = make_child(*node, edge, model, config, rng);
                leaf_value = edge.node->value;
                break;
            }
            SearchNode* child = edge.node.get();
            if (child->terminal || !child->expanded) {
                leaf_value = child->value;
                break;
            }
            node = child;
        }
        backup(path, leaf_value);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < root.children.size(); ++i)
        if (root.children[i].visits > root.children[best].visits) best = i;
    result.chosen = best;
    result.action = root.children[best].action;
    result.log_prob = root.children[best].log_prob;
    for (const auto& c : root.children) {
        result.priors.push_back(c.prior);
        result.visits.push_back(c.visits);
    }
    return result;
}

}  // namespace dogfight
