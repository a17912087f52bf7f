#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "interfere/dataset.hpp"
#include "interfere/network.hpp"

namespace interfere {

enum class SampleOrder {
    Uniform,       // i.i.d. with replacement
    EpochShuffle,  // seeded permutation per pass over the training subset
};

struct TrainConfig {
    double learning_rate = 0.02;
    double weight_decay = 2e-7;  // per update
    std::uint64_t total_iterations = 1'000'000;
    std::vector<std::uint64_t> checkpoints;
    std::uint64_t sample_seed = 0;
    bool decay_biases = true;
    SampleOrder order = SampleOrder::Uniform;

    /// Throws DomainError when a field violates its contract.
    void validate() const;
};

/// Mirrors the parameter shapes of a Network. `alpha` holds one entry per
/// layer and is only non-zero for layers with a trainable Blend activation.
struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::vector<double> alpha;

    static Gradients zeros_like(const Network& net);
    bool matches(const Network& net) const;
};

/// Squared error of the single network output against the target.
double loss(const Network& net, const Observation& obs);

/// Mean of `loss` over the training subset.
double mean_training_error(const Network& net, const Dataset& ds);

Gradients backprop(const Network& net, const Observation& obs);

/// Scratch buffers reused across iterations of `train`.
struct BackpropWorkspace {
    ForwardTrace trace;
    std::vector<double> delta;
    std::vector<double> upstream;
};

/// Writes the gradient into `grads` (which must already match the network)
/// and returns the loss at `obs`.
double backprop_into(const Network& net, const Observation& obs, BackpropWorkspace& ws, Gradients& grads);

/// w <- w * (1 - weight_decay) - learning_rate * g for weights (and biases
/// when decay_biases, otherwise b <- b - learning_rate * g). Trainable alphas
/// move by -learning_rate * g and are clamped to [0, 1].
void sgd_step(Network& net, const Gradients& g, const TrainConfig& cfg);

/// Receives the 1-based iteration just completed and the network after that
/// iteration's update.
using CheckpointFn = std::function<void(std::uint64_t iteration, const Network& net)>;

/// Online training: each iteration draws one training observation, computes
/// its gradient and applies one sgd_step. Throws NumericError if the output
/// becomes non-finite.
Network train(Network net, const Dataset& ds, const TrainConfig& cfg, const CheckpointFn& on_checkpoint = {});

/// `count` iterations geometrically spaced from `first` to `last` inclusive,
/// each rounded to the nearest integer.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t first, std::uint64_t last, std::size_t count);

}  // namespace interfere
