#include "interfere/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "interfere/errors.hpp"
#include "interfere/random.hpp"

namespace interfere {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw DomainError("training: learning_rate must be positive");
    }
    if (!(weight_decay >= 0.0 && weight_decay < 1.0)) {
        throw DomainError("training: weight_decay must lie in [0, 1)");
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        const auto c = checkpoints[i];
        if (c < 1 || c > total_iterations) {
            throw DomainError(fmt::format("training: checkpoint {} outside [1, {}]", c, total_iterations));
        }
        if (i > 0 && c <= checkpoints[i - 1]) {
            throw DomainError("training: checkpoints must be strictly increasing");
        }
    }
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    for (const Layer& l : net.layers()) {
        g.weights.emplace_back(l.weights.size(), 0.0);
        g.biases.emplace_back(l.biases.size(), 0.0);
    }
    g.alpha.assign(net.layers().size(), 0.0);
    return g;
}

bool Gradients::matches(const Network& net) const {
    const auto layers = net.layers();
    if (weights.size() != layers.size() || biases.size() != layers.size() || alpha.size() != layers.size()) {
        return false;
    }
    for (std::size_t k = 0; k < layers.size(); ++k) {
        if (weights[k].size() != layers[k].weights.size() || biases[k].size() != layers[k].biases.size()) {
            return false;
        }
    }
    return true;
}

namespace {

std::span<const double> input_of(const Observation& obs, double (&buf)[2]) {
    buf[0] = obs.input.x;
    buf[1] = obs.input.y;
    return buf;
}

void require_scalar_output(const Network& net) {
    if (net.output_arity() != 1) {
        throw DomainError("training: network must have exactly one output");
    }
}

}  // namespace

double loss(const Network& net, const Observation& obs) {
    require_scalar_output(net);
    double buf[2];
    const ForwardTrace trace = forward(net, input_of(obs, buf));
    const double e = trace.output()[0] - obs.target;
    return e * e;
}

double mean_training_error(const Network& net, const Dataset& ds) {
    if (ds.training.empty()) {
        throw DomainError("mean_training_error: empty training subset");
    }
    require_scalar_output(net);
    ForwardTrace trace;
    double sum = 0.0;
    for (const Observation& obs : ds.training) {
        double buf[2];
        forward_into(net, input_of(obs, buf), trace);
        const double e = trace.output()[0] - obs.target;
        sum += e * e;
    }
    return sum / static_cast<double>(ds.training.size());
}

double backprop_into(const Network& net, const Observation& obs, BackpropWorkspace& ws, Gradients& grads) {
    double buf[2];
    forward_into(net, input_of(obs, buf), ws.trace);
    const auto layers = net.layers();
    const std::size_t last = layers.size() - 1;

    const double err = ws.trace.post[last][0] - obs.target;
    // upstream holds dL/da for the current layer's outputs.
    ws.upstream.assign(1, 2.0 * err);

    for (std::size_t k = layers.size(); k-- > 0;) {
        const Layer& l = layers[k];
        const auto& z = ws.trace.pre[k];
        const std::span<const double> x = k == 0 ? std::span<const double>(ws.trace.input)
                                                 : std::span<const double>(ws.trace.post[k - 1]);
        ws.delta.resize(l.outputs);
        double g_alpha = 0.0;
        for (std::size_t j = 0; j < l.outputs; ++j) {
            ws.delta[j] = ws.upstream[j] * act_deriv(l.activation, z[j]);
            if (l.activation.kind == ActivationKind::Blend && l.activation.trainable) {
                g_alpha += ws.upstream[j] * act_alpha_deriv(z[j]);
            }
        }
        grads.alpha[k] = g_alpha;

        auto& gw = grads.weights[k];
        auto& gb = grads.biases[k];
        for (std::size_t j = 0; j < l.outputs; ++j) {
            const double d = ws.delta[j];
            double* row = gw.data() + j * l.inputs;
            for (std::size_t i = 0; i < l.inputs; ++i) {
                row[i] = d * x[i];
            }
            gb[j] = d;
        }

        if (k > 0) {
            ws.upstream.assign(l.inputs, 0.0);
            for (std::size_t i = 0; i < l.inputs; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < l.outputs; ++j) {
                    acc += l.weights[j * l.inputs + i] * ws.delta[j];
                }
                ws.upstream[i] = acc;
            }
        }
    }
    return err * err;
}

Gradients backprop(const Network& net, const Observation& obs) {
    require_scalar_output(net);
    BackpropWorkspace ws;
    Gradients g = Gradients::zeros_like(net);
    backprop_into(net, obs, ws, g);
    return g;
}

void sgd_step(Network& net, const Gradients& g, const TrainConfig& cfg) {
    if (!g.matches(net)) {
        throw DomainError("sgd_step: gradient shapes do not match the network");
    }
    const double lr = cfg.learning_rate;
    const double keep = 1.0 - cfg.weight_decay;
    const double bias_keep = cfg.decay_biases ? keep : 1.0;
    auto layers = net.layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
        Layer& l = layers[k];
        const auto& gw = g.weights[k];
        for (std::size_t i = 0; i < l.weights.size(); ++i) {
            l.weights[i] = l.weights[i] * keep - lr * gw[i];
        }
        const auto& gb = g.biases[k];
        for (std::size_t j = 0; j < l.biases.size(); ++j) {
            l.biases[j] = l.biases[j] * bias_keep - lr * gb[j];
        }
        if (l.activation.kind == ActivationKind::Blend && l.activation.trainable) {
            l.activation.alpha = std::clamp(l.activation.alpha - lr * g.alpha[k], 0.0, 1.0);
        }
    }
}

namespace {

class Sampler {
public:
    Sampler(std::size_t n, const TrainConfig& cfg) : n_(n), order_(cfg.order), rng_(cfg.sample_seed, "sample") {}

    std::size_t next() {
        if (order_ == SampleOrder::Uniform) {
            return static_cast<std::size_t>(rng_.index(n_));
        }
        if (cursor_ == perm_.size()) {
            reshuffle();
        }
        return perm_[cursor_++];
    }

private:
    // Fisher-Yates with the stream's own index draws.
    void reshuffle() {
        if (perm_.empty()) {
            perm_.resize(n_);
        }
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        for (std::size_t i = n_; i > 1; --i) {
            std::swap(perm_[i - 1], perm_[rng_.index(i)]);
        }
        cursor_ = 0;
    }

    std::size_t n_;
    SampleOrder order_;
    Rng rng_;
    std::vector<std::size_t> perm_;
    std::size_t cursor_ = 0;
};

}  // namespace

Network train(Network net, const Dataset& ds, const TrainConfig& cfg, const CheckpointFn& on_checkpoint) {
    cfg.validate();
    if (cfg.total_iterations == 0) {
        return net;
    }
    require_scalar_output(net);
    if (ds.training.empty()) {
        throw DomainError("train: empty training subset");
    }
    if (net.input_arity() != 2) {
        throw DomainError("train: observations are 2-D, network input arity must be 2");
    }

    Sampler sampler(ds.training.size(), cfg);
    BackpropWorkspace ws;
    Gradients grads = Gradients::zeros_like(net);
    auto next_checkpoint = cfg.checkpoints.begin();

    for (std::uint64_t it = 1; it <= cfg.total_iterations; ++it) {
        const Observation& obs = ds.training[sampler.next()];
        const double l = backprop_into(net, obs, ws, grads);
        if (!std::isfinite(l)) {
            throw NumericError(it, "non-finite network output");
        }
        sgd_step(net, grads, cfg);
        if (next_checkpoint != cfg.checkpoints.end() && *next_checkpoint == it) {
            if (!net.all_finite()) {
                throw NumericError(it, "non-finite weight");
            }
            if (on_checkpoint) {
                on_checkpoint(it, net);
            }
            ++next_checkpoint;
        }
    }
    if (!net.all_finite()) {
        throw NumericError(cfg.total_iterations, "non-finite weight");
    }
    return net;
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t first, std::uint64_t last, std::size_t count) {
    if (first < 1 || first >= last) {
        throw DomainError(fmt::format("geometric_checkpoints: need 1 <= first < last, got {} and {}", first, last));
    }
    if (count < 2) {
        throw DomainError("geometric_checkpoints: count must be at least 2");
    }
    const double log_first = std::log10(static_cast<double>(first));
    const double log_last = std::log10(static_cast<double>(last));
    std::vector<std::uint64_t> out(count);
    out.front() = first;
    out.back() = last;
    for (std::size_t i = 1; i + 1 < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        const double v = std::pow(10.0, log_first + (log_last - log_first) * t);
        out[i] = static_cast<std::uint64_t>(std::llround(v));
    }
    for (std::size_t i = 1; i < count; ++i) {
        if (out[i] <= out[i - 1]) {
            throw DomainError(fmt::format("geometric_checkpoints: rounding collision at {}", out[i]));
        }
    }
    return out;
}

}  // namespace interfere
