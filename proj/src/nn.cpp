#include "dogfight/nn.hpp"

#include <algorithm>
#include <cstring>

#include "dogfight/kernels.hpp"

namespace dogfight {

namespace k = kernels::omp;

std::vector<std::span<double>> MlpParams::tensors() {
    std::vector<std::span<double>> out;
    for (auto& l : layers) {
        out.emplace_back(l.weight);
        out.emplace_back(l.bias);
    }
    if (!log_std.empty()) out.emplace_back(log_std);
    return out;
}

std::vector<std::span<const double>> MlpParams::tensors() const {
    std::vector<std::span<const double>> out;
    for (const auto& l : layers) {
        out.emplace_back(l.weight);
        out.emplace_back(l.bias);
    }
    if (!log_std.empty()) out.emplace_back(log_std);
    return out;
}

MlpParams MlpParams::zeros_like() const {
    MlpParams z = *this;
    for (auto t : z.tensors()) std::fill(t.begin(), t.end(), 0.0);
    return z;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (auto t : tensors()) n += t.size();
    return n;
}

bool MlpParams::all_finite() const {
    for (auto t : tensors())
        for (double x : t)
            if (!std::isfinite(x)) return false;
    return true;
}

AdamState AdamState::for_params(const MlpParams& p) {
    AdamState s;
    s.m = p.zeros_like();
    s.v = p.zeros_like();
    return s;
}

std::vector<std::size_t> actor_layer_sizes() { return {kObservationSize, kHiddenSize, kHiddenSize, kActionSize}; }
std::vector<std::size_t> critic_layer_sizes() { return {kObservationSize, kHiddenSize, kHiddenSize, 1}; }

MlpParams init_params(std::uint64_t seed, std::span<const std::size_t> layer_sizes, bool with_log_std) {
    if (layer_sizes.size() < 2) throw ConfigError("init_params: need at least input and output sizes");
    Rng rng(derive_seed(seed, 0x1417));
    MlpParams p;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
        DenseLayer l;
        l.in = layer_sizes[i];
        l.out = layer_sizes[i + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
        l.weight.resize(l.in * l.out);
        for (double& w : l.weight) w = rng.uniform(-limit, limit);
        l.bias.assign(l.out, 0.0);
        p.layers.push_back(std::move(l));
    }
    if (with_log_std) p.log_std.assign(p.output_size(), 0.0);
    return p;
}

ForwardCache forward_cached(const MlpParams& p, std::span<const double> inputs, std::size_t rows) {
    if (inputs.size() != rows * p.input_size())
        throw ConfigError("forward: input dimension mismatch (expected " + std::to_string(p.input_size()) +
                          " per row)");
    ForwardCache c;
    c.rows = rows;
    c.activations.reserve(p.layers.size() + 1);
    c.activations.emplace_back(inputs.begin(), inputs.end());
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
        const DenseLayer& l = p.layers[i];
        std::vector<double> y(rows * l.out);
        k::dense_forward(c.activations.back(), rows, l.in, l.weight, l.bias, l.out, y);
        if (i + 1 < p.layers.size()) k::tanh_inplace(y);
        c.activations.push_back(std::move(y));
    }
    return c;
}

std::vector<double> forward(const MlpParams& p, std::span<const double> inputs, std::size_t rows) {
    return std::move(forward_cached(p, inputs, rows).activations.back());
}

Gradients backward(const MlpParams& p, const ForwardCache& cache, std::span<const double> d_output) {
    Gradients g = p.zeros_like();
    std::vector<double> delta(d_output.begin(), d_output.end());
    for (std::size_t i = p.layers.size(); i-- > 0;) {
        const DenseLayer& l = p.layers[i];
        const auto& x = cache.activations[i];
        k::dense_backward_params(x, delta, cache.rows, l.in, l.out, g.layers[i].weight, g.layers[i].bias);
        if (i == 0) break;
        std::vector<double> dx(cache.rows * l.in);
        k::dense_backward_input(delta, cache.rows, l.out, l.weight, l.in, dx);
        k::tanh_backward(x, dx);
        delta = std::move(dx);
    }
    return g;
}

LossAndGrad backprop(const MlpParams& p, std::span<const double> inputs, std::size_t rows,
                     const LossFn& loss) {
    const ForwardCache cache = forward_cached(p, inputs, rows);
    std::vector<double> d_out(cache.output().size(), 0.0);
    std::vector<double> d_log_std(p.log_std.size(), 0.0);
    LossAndGrad r;
    r.loss = loss(cache.output(), rows, p.log_std, d_out, d_log_std);
    if (!std::isfinite(r.loss)) throw Error("backprop: non-finite loss");
    r.grad = backward(p, cache, d_out);
    r.grad.log_std = std::move(d_log_std);
    if (!r.grad.all_finite()) throw Error("backprop: non-finite gradient");
    return r;
}

void adam_step(MlpParams& p, AdamState& s, const Gradients& g, double lr) {
    auto pt = p.tensors();
    auto gt = g.tensors();
    auto mt = s.m.tensors();
    auto vt = s.v.tensors();
    if (pt.size() != gt.size() || pt.size() != mt.size() || pt.size() != vt.size())
        throw ConfigError("adam_step: tensor count mismatch");
    for (std::size_t i = 0; i < pt.size(); ++i)
        if (pt[i].size() != gt[i].size() || pt[i].size() != mt[i].size() || pt[i].size() != vt[i].size())
            throw ConfigError("adam_step: tensor shape mismatch");

    ++s.step;
    const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
    for (std::size_t i = 0; i < pt.size(); ++i) {
        for (std::size_t j = 0; j < pt[i].size(); ++j) {
            const double gj = gt[i][j];
            mt[i][j] = s.beta1 * mt[i][j] + (1.0 - s.beta1) * gj;
            vt[i][j] = s.beta2 * vt[i][j] + (1.0 - s.beta2) * gj * gj;
            const double m_hat = mt[i][j] / bc1;
            const double v_hat = vt[i][j] / bc2;
            const double next = pt[i][j] - lr * m_hat / (std::sqrt(v_hat) + s.eps);
            if (!std::isfinite(next)) throw Error("adam_step: non-finite parameter");
            pt[i][j] = next;
        }
    }
    for (double& ls : p.log_std) ls = std::clamp(ls, kLogStdMin, kLogStdMax);
}

double gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> action) {
    constexpr double half_log_2pi = 0.91893853320467274178;
    double lp = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
        lp += -0.5 * z * z - log_std[i] - half_log_2pi;
    }
    return lp;
}

double gaussian_entropy(std::span<const double> log_std) {
    constexpr double half_log_2pi_e = 1.41893853320467274178;
    double h = 0.0;
    for (double ls : log_std) h += half_log_2pi_e + ls;
    return h;
}

ActionCommand policy_mean(const MlpParams& actor, const Observation& obs) {
    const auto out = forward(actor, obs, 1);
    ActionCommand a{};
    std::copy_n(out.begin(), kActionSize, a.begin());
    return a;
}

double critic_value(const MlpParams& critic, const Observation& obs) {
    return forward(critic, obs, 1)[0];
}

SampledAction sample_from_mean(const ActionCommand& mean, std::span<const double> log_std, Rng& rng) {
    SampledAction s;
    for (std::size_t i = 0; i < kActionSize; ++i) s.action[i] = mean[i] + std::exp(log_std[i]) * rng.normal();
    s.log_prob = gaussian_log_prob(mean, log_std, s.action);
    return s;
}

SampledAction sample_and_logprob(const MlpParams& actor, const Observation& obs, Rng& rng) {
    return sample_from_mean(policy_mean(actor, obs), actor.log_std, rng);
}

std::uint64_t params_hash(const MlpParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto t : p.tensors()) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(t.data());
        for (std::size_t i = 0; i < t.size_bytes(); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

}  // namespace dogfight
