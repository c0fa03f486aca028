#pragma once

// Multilayer perceptron with tanh hidden layers, manual backpropagation and Adam.
//
// The actor maps a 13-vector observation to the mean of a diagonal Gaussian over
// the 4 raw action dimensions; its standard deviation is a separate,
// state-independent log-std vector. The critic maps the observation to a scalar.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dogfight/common.hpp"
#include "dogfight/environment.hpp"

namespace dogfight {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr std::size_t kHiddenSize = 256;

struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;  // [in][out]
    std::vector<double> bias;    // [out]

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct MlpParams {
    std::vector<DenseLayer> layers;
    std::vector<double> log_std;  // actor only; empty for a critic

    friend bool operator==(const MlpParams&, const MlpParams&) = default;

    std::size_t input_size() const { return layers.front().in; }
    std::size_t output_size() const { return layers.back().out; }

    /// All parameter tensors in a fixed order: (weight, bias) per layer, then log-std.
    std::vector<std::span<double>> tensors();
    std::vector<std::span<const double>> tensors() const;

    /// Zero-filled parameters of the same shape.
    MlpParams zeros_like() const;
    std::size_t parameter_count() const;
    bool all_finite() const;
};

using Gradients = MlpParams;

struct AdamState {
    MlpParams m;
    MlpParams v;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_params(const MlpParams& p);
};

std::vector<std::size_t> actor_layer_sizes();
std::vector<std::size_t> critic_layer_sizes();

/// Glorot-uniform weights, zero biases, zero log-std (when with_log_std).
MlpParams init_params(std::uint64_t seed, std::span<const std::size_t> layer_sizes, bool with_log_std);

/// Outputs for `rows` stacked inputs, [rows][output_size].
std::vector<double> forward(const MlpParams& p, std::span<const double> inputs, std::size_t rows);

/// Activations kept for the backward pass.
struct ForwardCache {
    std::size_t rows = 0;
    std::vector<std::vector<double>> activations;  // [0] = input, back() = output
    std::span<const double> output() const { return activations.back(); }
};

ForwardCache forward_cached(const MlpParams& p, std::span<const double> inputs, std::size_t rows);

/// Gradients of a scalar loss given dL/d(output) for every row. The log-std
/// entry of the result is left zero; losses that depend on it fill it in.
Gradients backward(const MlpParams& p, const ForwardCache& cache, std::span<const double> d_output);

/// A scalar loss over a batch of network outputs. Writes dL/d(output) into
/// d_output ([rows][out]) and dL/d(log-std) into d_log_std (may be empty).
using LossFn = std::function<double(std::span<const double> output, std::size_t rows,
                                    std::span<const double> log_std, std::span<double> d_output,
                                    std::span<double> d_log_std)>;

struct LossAndGrad {
    double loss = 0.0;
    Gradients grad;
};

/// Loss value and exact reverse-mode gradients for every parameter. Throws
/// Error if the loss or any gradient is non-finite.
LossAndGrad backprop(const MlpParams& p, std::span<const double> inputs, std::size_t rows,
                     const LossFn& loss);

/// Adam with bias correction. Log-std is clamped to [kLogStdMin, kLogStdMax]
/// afterwards. Throws Error if the update would write a non-finite value.
void adam_step(MlpParams& p, AdamState& state, const Gradients& g, double lr);

// Policy helpers.

double gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                         std::span<const double> action);
double gaussian_entropy(std::span<const double> log_std);

ActionCommand policy_mean(const MlpParams& actor, const Observation& obs);
double critic_value(const MlpParams& critic, const Observation& obs);

struct SampledAction {
    ActionCommand action{};
    double log_prob = 0.0;
};

/// Draws from Normal(mean(obs), exp(log-std)) per dimension.
SampledAction sample_and_logprob(const MlpParams& actor, const Observation& obs, Rng& rng);

/// Same, from an already computed mean.
SampledAction sample_from_mean(const ActionCommand& mean, std::span<const double> log_std, Rng& rng);

/// FNV-1a over the raw bytes of every tensor.
std::uint64_t params_hash(const MlpParams& p);

}  // namespace dogfight
