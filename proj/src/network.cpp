#include "interfere/network.hpp"

#include <cmath>
#include <iterator>

#include <fmt/format.h>

#include "interfere/errors.hpp"
#include "interfere/image.hpp"
#include "interfere/keyvalue.hpp"
#include "interfere/random.hpp"

namespace interfere {

ActivationSpec ActivationSpec::blend(double alpha, bool trainable) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError(fmt::format("blend alpha {} outside [0, 1]", alpha));
    }
    return {ActivationKind::Blend, alpha, trainable};
}

double act(const ActivationSpec& spec, double z) {
    const double t = std::tanh(z);
    if (spec.kind == ActivationKind::Tanh || spec.alpha == 0.0) {
        return t;
    }
    return (1.0 - spec.alpha) * t + spec.alpha * std::exp(-z * z);
}

double act_deriv(const ActivationSpec& spec, double z) {
    const double t = std::tanh(z);
    const double dt = 1.0 - t * t;
    if (spec.kind == ActivationKind::Tanh || spec.alpha == 0.0) {
        return dt;
    }
    return (1.0 - spec.alpha) * dt + spec.alpha * (-2.0 * z * std::exp(-z * z));
}

double act_alpha_deriv(double z) { return std::exp(-z * z) - std::tanh(z); }

std::string_view to_string(ActivationKind kind) {
    return kind == ActivationKind::Tanh ? "tanh" : "blend";
}

ActivationKind parse_activation_kind(std::string_view name) {
    if (name == "tanh") {
        return ActivationKind::Tanh;
    }
    if (name == "blend") {
        return ActivationKind::Blend;
    }
    throw DomainError(fmt::format("unknown activation '{}'", name));
}

// Network --------------------------------------------------------------------

Network::Network(std::size_t input_arity, std::vector<Layer> layers)
    : input_arity_(input_arity), layers_(std::move(layers)) {
    if (input_arity_ == 0) {
        throw DomainError("Network: input arity must be positive");
    }
    if (layers_.empty()) {
        throw DomainError("Network: no layers");
    }
    std::size_t expected_in = input_arity_;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const Layer& l = layers_[k];
        if (l.inputs != expected_in) {
            throw DomainError(fmt::format("Network: layer {} takes {} inputs, previous layer gives {}", k,
                                          l.inputs, expected_in));
        }
        if (l.outputs == 0) {
            throw DomainError(fmt::format("Network: layer {} has no outputs", k));
        }
        if (l.weights.size() != l.inputs * l.outputs || l.biases.size() != l.outputs) {
            throw DomainError(fmt::format("Network: layer {} parameter shape mismatch", k));
        }
        if (!(l.activation.alpha >= 0.0 && l.activation.alpha <= 1.0)) {
            throw DomainError(fmt::format("Network: layer {} alpha outside [0, 1]", k));
        }
        expected_in = l.outputs;
    }
    if (!all_finite()) {
        throw DomainError("Network: non-finite parameter");
    }
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers_) {
        n += l.weights.size() + l.biases.size();
    }
    return n;
}

bool Network::all_finite() const {
    for (const Layer& l : layers_) {
        for (double w : l.weights) {
            if (!std::isfinite(w)) {
                return false;
            }
        }
        for (double b : l.biases) {
            if (!std::isfinite(b)) {
                return false;
            }
        }
        if (!std::isfinite(l.activation.alpha)) {
            return false;
        }
    }
    return true;
}

namespace {

std::vector<Layer> shaped_layers(std::span<const std::size_t> widths, std::span<const ActivationSpec> acts) {
    if (widths.size() < 2) {
        throw DomainError("architecture needs at least an input and an output width");
    }
    for (std::size_t w : widths) {
        if (w == 0) {
            throw DomainError("architecture widths must be positive");
        }
    }
    const std::size_t n_layers = widths.size() - 1;
    if (acts.size() != 1 && acts.size() != n_layers) {
        throw DomainError(fmt::format("expected 1 or {} activation specs, got {}", n_layers, acts.size()));
    }
    std::vector<Layer> layers(n_layers);
    for (std::size_t k = 0; k < n_layers; ++k) {
        Layer& l = layers[k];
        l.inputs = widths[k];
        l.outputs = widths[k + 1];
        l.weights.assign(l.inputs * l.outputs, 0.0);
        l.biases.assign(l.outputs, 0.0);
        l.activation = acts.size() == 1 ? acts[0] : acts[k];
    }
    return layers;
}

}  // namespace

Network zero_network(std::span<const std::size_t> widths, std::span<const ActivationSpec> acts) {
    auto layers = shaped_layers(widths, acts);
    return Network(widths[0], std::move(layers));
}

Network init_network(std::span<const std::size_t> widths, std::span<const ActivationSpec> acts,
                     std::uint64_t seed) {
    auto layers = shaped_layers(widths, acts);
    Rng rng(seed, "init");
    for (Layer& l : layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.inputs));
        for (double& w : l.weights) {
            w = rng.uniform(-bound, bound);
        }
        for (double& b : l.biases) {
            b = rng.uniform(-bound, bound);
        }
    }
    return Network(widths[0], std::move(layers));
}

// Forward --------------------------------------------------------------------

void forward_into(const Network& net, std::span<const double> input, ForwardTrace& trace) {
    if (input.size() != net.input_arity()) {
        throw DomainError(fmt::format("forward: expected {} inputs, got {}", net.input_arity(), input.size()));
    }
    const auto layers = net.layers();
    trace.input.assign(input.begin(), input.end());
    trace.pre.resize(layers.size());
    trace.post.resize(layers.size());
    std::span<const double> x = trace.input;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const Layer& l = layers[k];
        auto& z = trace.pre[k];
        auto& a = trace.post[k];
        z.resize(l.outputs);
        a.resize(l.outputs);
        const double* w = l.weights.data();
        for (std::size_t j = 0; j < l.outputs; ++j, w += l.inputs) {
            double acc = 0.0;
            for (std::size_t i = 0; i < l.inputs; ++i) {
                acc += w[i] * x[i];
            }
            z[j] = acc + l.biases[j];
            a[j] = act(l.activation, z[j]);
        }
        x = a;
    }
}

ForwardTrace forward(const Network& net, std::span<const double> input) {
    ForwardTrace trace;
    forward_into(net, input, trace);
    return trace;
}

// Serialization ---------------------------------------------------------------

namespace {

constexpr std::string_view kNetworkHeader = "interfere-network 1";

void append_reals(std::string& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        fmt::format_to(std::back_inserter(out), "{:.17g}", values[i]);
    }
}

}  // namespace

std::string serialize_network(const Network& net) {
    std::string out{kNetworkHeader};
    out += '\n';
    fmt::format_to(std::back_inserter(out), "input_arity = {}\nlayer_count = {}\n", net.input_arity(),
                   net.layers().size());
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        const Layer& l = net.layer(k);
        fmt::format_to(std::back_inserter(out),
                       "layer.{0}.inputs = {1}\nlayer.{0}.outputs = {2}\nlayer.{0}.activation = {3}\n"
                       "layer.{0}.alpha = {4:.17g}\nlayer.{0}.trainable_alpha = {5}\nlayer.{0}.weights = ",
                       k, l.inputs, l.outputs, to_string(l.activation.kind), l.activation.alpha,
                       l.activation.trainable ? "true" : "false");
        append_reals(out, l.weights);
        fmt::format_to(std::back_inserter(out), "\nlayer.{}.biases = ", k);
        append_reals(out, l.biases);
        out += '\n';
    }
    return out;
}

Network parse_network(std::string_view text) {
    const KeyValueDoc doc = KeyValueDoc::parse(text, kNetworkHeader, "network");
    const std::size_t arity = doc.count("input_arity");
    const std::size_t count = doc.count("layer_count");
    std::vector<Layer> layers(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::string p = fmt::format("layer.{}.", k);
        Layer& l = layers[k];
        l.inputs = doc.count(p + "inputs");
        l.outputs = doc.count(p + "outputs");
        try {
            l.activation.kind = parse_activation_kind(doc.str(p + "activation"));
        } catch (const DomainError& e) {
            throw ParseError(fmt::format("network: {}", e.what()));
        }
        l.activation.alpha = doc.real(p + "alpha");
        l.activation.trainable = doc.boolean(p + "trainable_alpha");
        l.weights = doc.reals(p + "weights");
        l.biases = doc.reals(p + "biases");
    }
    try {
        return Network(arity, std::move(layers));
    } catch (const DomainError& e) {
        throw ParseError(fmt::format("network: {}", e.what()));
    }
}

void save_network_file(const std::string& path, const Network& net) { write_file(path, serialize_network(net)); }

Network load_network_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_network(text);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path, e.what()));
    }
}

}  // namespace interfere
