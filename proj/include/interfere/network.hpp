#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace interfere {

enum class ActivationKind { Tanh, Blend };

/// Blend is (1 - alpha) * tanh(z) + alpha * exp(-z^2): alpha = 0 is tanh,
/// alpha = 1 is a Gaussian bump.
struct ActivationSpec {
    ActivationKind kind = ActivationKind::Tanh;
    double alpha = 0.0;
    bool trainable = false;

    static ActivationSpec tanh() { return {}; }
    static ActivationSpec blend(double alpha, bool trainable = false);

    friend bool operator==(const ActivationSpec&, const ActivationSpec&) = default;
};

double act(const ActivationSpec& spec, double z);
double act_deriv(const ActivationSpec& spec, double z);
/// Partial derivative of a Blend activation with respect to alpha.
double act_alpha_deriv(double z);

std::string_view to_string(ActivationKind kind);
ActivationKind parse_activation_kind(std::string_view name);

/// Fully connected layer. The bias acts as one extra input fixed at 1.
struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> biases;   // outputs
    ActivationSpec activation;

    double weight(std::size_t out, std::size_t in) const { return weights[out * inputs + in]; }
    double& weight(std::size_t out, std::size_t in) { return weights[out * inputs + in]; }

    friend bool operator==(const Layer&, const Layer&) = default;
};

class Network {
public:
    Network() = default;
    /// Validates shapes, chaining and finiteness.
    Network(std::size_t input_arity, std::vector<Layer> layers);

    std::size_t input_arity() const noexcept { return input_arity_; }
    std::size_t output_arity() const noexcept { return layers_.back().outputs; }
    std::span<const Layer> layers() const noexcept { return layers_; }
    std::span<Layer> layers() noexcept { return layers_; }
    const Layer& layer(std::size_t k) const { return layers_.at(k); }
    Layer& layer(std::size_t k) { return layers_.at(k); }

    std::size_t parameter_count() const;
    bool all_finite() const;

    friend bool operator==(const Network&, const Network&) = default;

private:
    std::size_t input_arity_ = 0;
    std::vector<Layer> layers_;
};

/// Builds a network of the given widths (input arity first) with all
/// parameters zero.
Network zero_network(std::span<const std::size_t> widths, std::span<const ActivationSpec> acts);

/// Each parameter of a layer with n inputs is uniform on [-1/sqrt(n), 1/sqrt(n)),
/// drawn layer by layer, weights row-major before biases. `acts` holds one
/// spec per layer, or a single spec applied to all layers.
Network init_network(std::span<const std::size_t> widths, std::span<const ActivationSpec> acts,
                     std::uint64_t seed);

/// Pre-activations (z) and activations (a) for every layer, plus the input.
struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;

    std::span<const double> output() const { return post.back(); }
};

ForwardTrace forward(const Network& net, std::span<const double> input);

/// Allocation-free variant for hot loops; `trace` is resized on first use.
void forward_into(const Network& net, std::span<const double> input, ForwardTrace& trace);

/// Plain-text key = value format with a versioned header. Reals are written
/// with 17 significant digits so loading reproduces every bit.
std::string serialize_network(const Network& net);
Network parse_network(std::string_view text);

void save_network_file(const std::string& path, const Network& net);
Network load_network_file(const std::string& path);

}  // namespace interfere
