#pragma once

// Clipped-surrogate PPO over rollout buffers. The critic regresses onto the
// discounted final outcome of each episode rather than bootstrapped returns.

#include <span>
#include <vector>

#include "dogfight/nn.hpp"

namespace dogfight {

struct Transition {
    Observation obs{};
    ActionCommand action{};
    double log_prob = 0.0;
    double reward = 0.0;
    double value = 0.0;  // critic estimate at collection time
    bool done = false;
    double outcome = 0.0;  // episode result z, backfilled when the episode closes
    double advantage = 0.0;
    double value_target = 0.0;
};

struct TrainConfig {
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double clip_epsilon = 0.2;
    int epochs = 6;
    std::size_t batch_size = 1024;
    double actor_lr = 0.002;
    double critic_lr = 0.001;
    double entropy_coeff = 0.01;

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

class RolloutBuffer {
public:
    struct Episode {
        std::size_t begin = 0;
        std::size_t end = 0;
    };

    /// Appends one finished episode and backfills its outcome into every step.
    /// The last transition must have done = true.
    void append_episode(std::vector<Transition> steps, double outcome);

    std::size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    std::span<const Episode> episodes() const { return episodes_; }
    std::span<const Transition> transitions() const { return steps_; }
    std::span<Transition> transitions() { return steps_; }
    void clear();

private:
    std::vector<Transition> steps_;
    std::vector<Episode> episodes_;
};

/// GAE advantages (un-normalized) and discounted-outcome value targets.
void compute_gae(RolloutBuffer& buffer, const TrainConfig& config);

/// Rescales the buffer's advantages to zero mean and unit variance.
void normalize_advantages(RolloutBuffer& buffer);

/// compute_gae followed by normalize_advantages.
void compute_advantages(RolloutBuffer& buffer, const TrainConfig& config);

/// min(ratio * adv, clip(ratio, 1 - eps, 1 + eps) * adv)
double clipped_surrogate_term(double ratio, double advantage, double clip_epsilon);

/// Stacked training samples.
struct Minibatch {
    std::size_t rows = 0;
    std::vector<double> obs;      // [rows][13]
    std::vector<double> actions;  // [rows][4]
    std::vector<double> old_log_prob;
    std::vector<double> advantages;
    std::vector<double> value_targets;

    static Minibatch gather(std::span<const Transition> steps, std::span<const std::size_t> indices);
};

struct SurrogateStats {
    double surrogate = 0.0;      // mean per-sample clipped term
    double clip_fraction = 0.0;  // share of samples with |ratio - 1| > eps
    double approx_kl = 0.0;      // mean(old log-prob - new log-prob)
};

/// -mean(clipped surrogate). Gradients reach the mean outputs and log-std.
LossFn surrogate_loss(const Minibatch& batch, double clip_epsilon, SurrogateStats* stats = nullptr);

/// -coeff * entropy of the diagonal Gaussian (depends on log-std only).
LossFn entropy_loss(double coeff);

/// surrogate_loss + entropy_loss(config.entropy_coeff).
LossFn actor_loss(const Minibatch& batch, const TrainConfig& config, SurrogateStats* stats = nullptr);

/// mean squared error to the value targets.
LossFn value_loss(const Minibatch& batch);

struct ActorLoss {
    double loss = 0.0;
    double entropy = 0.0;
    SurrogateStats stats;
};

/// Evaluates the actor objective on a minibatch without computing gradients.
ActorLoss clipped_loss(const MlpParams& actor, const Minibatch& batch, const TrainConfig& config);

struct TrainMetrics {
    double surrogate = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;
    std::size_t updates = 0;
};

/// An actor or critic together with its optimizer state.
struct Learner {
    MlpParams params;
    AdamState adam;

    explicit Learner(MlpParams p) : params(std::move(p)), adam(AdamState::for_params(params)) {}
};

/// `epochs` shuffled passes over the buffer in minibatches of batch_size.
/// Advantages must already be computed. Throws ConfigError when the buffer holds
/// fewer than batch_size transitions.
TrainMetrics train_iteration(Learner& actor, Learner& critic, const RolloutBuffer& buffer,
                             const TrainConfig& config, Rng& rng);

}  // namespace dogfight
