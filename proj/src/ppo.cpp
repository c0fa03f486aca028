#include "dogfight/ppo.hpp"

#include <algorithm>
#include <numeric>

namespace dogfight {

void TrainConfig::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
    if (!(gae_lambda > 0.0 && gae_lambda <= 1.0)) throw ConfigError("gae_lambda must be in (0, 1]");
    if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) throw ConfigError("clip_epsilon must be in (0, 1)");
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("learning rates must be positive");
    if (!(entropy_coeff >= 0.0)) throw ConfigError("entropy_coeff must be non-negative");
}

void RolloutBuffer::append_episode(std::vector<Transition> steps, double outcome) {
    if (steps.empty()) throw ConfigError("append_episode: empty episode");
    if (!steps.back().done) throw ConfigError("append_episode: episode is not closed");
    Episode ep{steps_.size(), steps_.size() + steps.size()};
    for (auto& t : steps) {
        if (!std::isfinite(t.log_prob)) throw Error("append_episode: non-finite log-probability");
        t.outcome = outcome;
        steps_.push_back(t);
    }
    episodes_.push_back(ep);
}

void RolloutBuffer::clear() {
    steps_.clear();
    episodes_.clear();
}

void compute_gae(RolloutBuffer& buffer, const TrainConfig& config) {
    auto steps = buffer.transitions();
    for (const auto& ep : buffer.episodes()) {
        if (ep.end <= ep.begin || !steps[ep.end - 1].done) throw ConfigError("compute_gae: open episode");
        double gae = 0.0;
        double target = steps[ep.end - 1].outcome;
        for (std::size_t t = ep.end; t-- > ep.begin;) {
            const double next_value = (t + 1 == ep.end) ? 0.0 : steps[t + 1].value;
            const double delta = steps[t].reward + config.gamma * next_value - steps[t].value;
            gae = delta + config.gamma * config.gae_lambda * gae;
            steps[t].advantage = gae;
            if (t + 1 < ep.end) target *= config.gamma;
            steps[t].value_target = target;
        }
    }
}

void normalize_advantages(RolloutBuffer& buffer) {
    auto steps = buffer.transitions();
    if (steps.empty()) return;
    const double n = static_cast<double>(steps.size());
    double mean = 0.0;
    for (const auto& t : steps) mean += t.advantage;
    mean /= n;
    double var = 0.0;
    for (const auto& t : steps) var += (t.advantage - mean) * (t.advantage - mean);
    var /= n;
    const double scale = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
    for (auto& t : steps) t.advantage = (t.advantage - mean) * scale;
}

void compute_advantages(RolloutBuffer& buffer, const TrainConfig& config) {
    compute_gae(buffer, config);
    normalize_advantages(buffer);
}

double clipped_surrogate_term(double ratio, double advantage, double clip_epsilon) {
    const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

Minibatch Minibatch::gather(std::span<const Transition> steps, std::span<const std::size_t> indices) {
    Minibatch b;
    b.rows = indices.size();
    b.obs.reserve(b.rows * kObservationSize);
    b.actions.reserve(b.rows * kActionSize);
    for (std::size_t i : indices) {
        const Transition& t = steps[i];
        b.obs.insert(b.obs.end(), t.obs.begin(), t.obs.end());
        b.actions.insert(b.actions.end(), t.action.begin(), t.action.end());
        b.old_log_prob.push_back(t.log_prob);
        b.advantages.push_back(t.advantage);
        b.value_targets.push_back(t.value_target);
    }
    return b;
}

LossFn surrogate_loss(const Minibatch& batch, double clip_epsilon, SurrogateStats* stats) {
    return [&batch, clip_epsilon, stats](std::span<const double> out, std::size_t rows,
                                         std::span<const double> log_std, std::span<double> d_out,
                                         std::span<double> d_log_std) {
        const std::size_t dim = log_std.size();
        const double inv_n = 1.0 / static_cast<double>(rows);
        double loss = 0.0;
        SurrogateStats s;
        for (std::size_t r = 0; r < rows; ++r) {
            auto mean = out.subspan(r * dim, dim);
            std::span<const double> act(batch.actions.data() + r * dim, dim);
            const double lp = gaussian_log_prob(mean, log_std, act);
            const double ratio = std::exp(lp - batch.old_log_prob[r]);
            if (!std::isfinite(ratio))
                throw Error("surrogate_loss: non-finite probability ratio at sample " + std::to_string(r));
            const double adv = batch.advantages[r];
            const double term = clipped_surrogate_term(ratio, adv, clip_epsilon);
            loss -= term * inv_n;
            s.surrogate += term * inv_n;
            s.approx_kl += (batch.old_log_prob[r] - lp) * inv_n;
            if (std::abs(ratio - 1.0) > clip_epsilon) s.clip_fraction += inv_n;

            // Only the unclipped branch carries gradient.
            if (ratio * adv <= term) {
                const double g = -adv * ratio * inv_n;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double inv_var = std::exp(-2.0 * log_std[i]);
                    const double diff = act[i] - mean[i];
                    d_out[r * dim + i] += g * diff * inv_var;
                    d_log_std[i] += g * (diff * diff * inv_var - 1.0);
                }
            }
        }
        if (stats) *stats = s;
        return loss;
    };
}

LossFn entropy_loss(double coeff) {
    return [coeff](std::span<const double>, std::size_t, std::span<const double> log_std,
                   std::span<double>, std::span<double> d_log_std) {
        for (double& d : d_log_std) d += -coeff;
        return -coeff * gaussian_entropy(log_std);
    };
}

LossFn actor_loss(const Minibatch& batch, const TrainConfig& config, SurrogateStats* stats) {
    return [surr = surrogate_loss(batch, config.clip_epsilon, stats),
            ent = entropy_loss(config.entropy_coeff)](std::span<const double> out, std::size_t rows,
                                                      std::span<const double> log_std,
                                                      std::span<double> d_out, std::span<double> d_log_std) {
        return surr(out, rows, log_std, d_out, d_log_std) + ent(out, rows, log_std, d_out, d_log_std);
    };
}

LossFn value_loss(const Minibatch& batch) {
    return [&batch](std::span<const double> out, std::size_t rows, std::span<const double>,
                    std::span<double> d_out, std::span<double>) {
        const double inv_n = 1.0 / static_cast<double>(rows);
        double loss = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            const double err = out[r] - batch.value_targets[r];
            loss += err * err * inv_n;
            d_out[r] += 2.0 * err * inv_n;
        }
        return loss;
    };
}

ActorLoss clipped_loss(const MlpParams& actor, const Minibatch& batch, const TrainConfig& config) {
    const auto out = forward(actor, batch.obs, batch.rows);
    std::vector<double> d_out(out.size(), 0.0);
    std::vector<double> d_log_std(actor.log_std.size(), 0.0);
    ActorLoss r;
    r.loss = actor_loss(batch, config, &r.stats)(out, batch.rows, actor.log_std, d_out, d_log_std);
    r.entropy = gaussian_entropy(actor.log_std);
    return r;
}

TrainMetrics train_iteration(Learner& actor, Learner& critic, const RolloutBuffer& buffer,
                             const TrainConfig& config, Rng& rng) {
    config.validate();
    if (buffer.size() < config.batch_size)
        throw ConfigError("train_iteration: buffer holds " + std::to_string(buffer.size()) +
                          " transitions, batch_size is " + std::to_string(config.batch_size));

    std::vector<std::size_t> order(buffer.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    TrainMetrics m;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            const Minibatch batch = Minibatch::gather(
                buffer.transitions(), std::span<const std::size_t>(order).subspan(start, stop - start));

            SurrogateStats stats;
            const auto a = backprop(actor.params, batch.obs, batch.rows, actor_loss(batch, config, &stats));
            const double entropy = gaussian_entropy(actor.params.log_std);
            adam_step(actor.params, actor.adam, a.grad, config.actor_lr);

            const auto c = backprop(critic.params, batch.obs, batch.rows, value_loss(batch));
            adam_step(critic.params, critic.adam, c.grad, config.critic_lr);

            m.surrogate += stats.surrogate;
            m.clip_fraction += stats.clip_fraction;
            m.approx_kl += stats.approx_kl;
            m.entropy += entropy;
            m.value_loss += c.loss;
            ++m.updates;
        }
    }
    const double inv = 1.0 / static_cast<double>(m.updates);
    m.surrogate *= inv;
    m.clip_fraction *= inv;
    m.approx_kl *= inv;
    m.entropy *= inv;
    m.value_loss *= inv;
    return m;
}

}  // namespace dogfight
