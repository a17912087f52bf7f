#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "interfere/errors.hpp"
#include "interfere/network.hpp"
#include "oracles.hpp"

using namespace interfere;

namespace {

const std::vector<std::size_t> kArch{2, 16, 16, 1};
const ActivationSpec kTanh = ActivationSpec::tanh();

}  // namespace

TEST(Activation, Values) {
    EXPECT_EQ(act(kTanh, 0.0), 0.0);
    EXPECT_EQ(act(ActivationSpec::blend(1.0), 0.0), 1.0);
    // tanh(0.5) to 30 digits: 0.462117157260009758502318483644
    EXPECT_NEAR(act(kTanh, 0.5), 0.462117157260009758502318483644, 1e-16);
}

TEST(Activation, Derivatives) {
    EXPECT_EQ(act_deriv(kTanh, 0.0), 1.0);
    EXPECT_EQ(act_deriv(ActivationSpec::blend(1.0), 0.0), 0.0);
    // 1 - tanh^2(2) = 0.070650824853164465686247655861
    EXPECT_NEAR(act_deriv(kTanh, 2.0), 0.070650824853164465686247655861, 1e-16);
}

TEST(Activation, BlendAtZeroAlphaIsTanhBitForBit) {
    const ActivationSpec b0 = ActivationSpec::blend(0.0);
    for (double z = -8.0; z <= 8.0; z += 0.013) {
        EXPECT_EQ(act(b0, z), act(kTanh, z));
        EXPECT_EQ(act_deriv(b0, z), act_deriv(kTanh, z));
    }
}

TEST(Activation, SymmetryAndBounds) {
    const ActivationSpec gauss = ActivationSpec::blend(1.0);
    double best = -1.0;
    double best_z = 1.0;
    for (double z = -10.0; z <= 10.0; z += 0.01) {
        EXPECT_EQ(act(kTanh, -z), -act(kTanh, z));
        EXPECT_EQ(act(gauss, -z), act(gauss, z));
        EXPECT_LE(std::abs(act(kTanh, z)), 1.0);
        EXPECT_LT(std::abs(act(kTanh, z)), 1.0 + 1e-300);
        if (act_deriv(kTanh, z) > best) {
            best = act_deriv(kTanh, z);
            best_z = z;
        }
    }
    EXPECT_NEAR(best_z, 0.0, 1e-9);
    EXPECT_LT(std::abs(act(kTanh, 3.0)), 1.0);
    EXPECT_THROW(ActivationSpec::blend(1.5), DomainError);
}

TEST(Activation, DerivativeMatchesFiniteDifferences) {
    const double h = 1e-5;
    for (const ActivationSpec& spec : {kTanh, ActivationSpec::blend(0.3), ActivationSpec::blend(0.8),
                                       ActivationSpec::blend(1.0)}) {
        for (double z = -5.0; z <= 5.0; z += 0.0371) {
            const double fd = (act(spec, z + h) - act(spec, z - h)) / (2 * h);
            EXPECT_TRUE(oracle::close_rel(act_deriv(spec, z), fd, 1e-6, 1e-10))
                << "alpha " << spec.alpha << " z " << z << ": " << act_deriv(spec, z) << " vs " << fd;

            // d/dalpha of the blend family
            const double a = spec.alpha;
            if (a >= h && a <= 1 - h) {
                const double fa = (act(ActivationSpec::blend(a + h), z) - act(ActivationSpec::blend(a - h), z)) / (2 * h);
                EXPECT_TRUE(oracle::close_rel(act_alpha_deriv(z), fa, 1e-6, 1e-10)) << z;
            }
        }
    }
}

TEST(InitNetwork, PaperArchitectureShapes) {
    const Network net = init_network(kArch, std::span(&kTanh, 1), 7);
    ASSERT_EQ(net.layers().size(), 3u);
    EXPECT_EQ(net.input_arity(), 2u);
    EXPECT_EQ(net.layer(0).outputs, 16u);
    EXPECT_EQ(net.layer(0).inputs, 2u);
    EXPECT_EQ(net.layer(1).outputs, 16u);
    EXPECT_EQ(net.layer(1).inputs, 16u);
    EXPECT_EQ(net.layer(2).outputs, 1u);
    EXPECT_EQ(net.layer(2).inputs, 16u);
    EXPECT_EQ(net.parameter_count(), 48u + 272u + 17u);
}

TEST(InitNetwork, DeterministicPerSeed) {
    EXPECT_EQ(init_network(kArch, std::span(&kTanh, 1), 7), init_network(kArch, std::span(&kTanh, 1), 7));
    EXPECT_FALSE(init_network(kArch, std::span(&kTanh, 1), 7) == init_network(kArch, std::span(&kTanh, 1), 8));
}

TEST(InitNetwork, ParametersWithinFanInBound) {
    const double bound0 = 0.707106781186547524400844362105;  // 1/sqrt(2)
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Network net = init_network(kArch, std::span(&kTanh, 1), seed);
        for (double w : net.layer(0).weights) {
            EXPECT_GE(w, -bound0);
            EXPECT_LE(w, bound0);
        }
        for (double w : net.layer(1).weights) {
            EXPECT_LE(std::abs(w), 0.25);
        }
    }
}

TEST(InitNetwork, RejectsBadArchitecture) {
    const std::vector<std::size_t> one{2};
    const std::vector<std::size_t> zero{2, 0, 1};
    EXPECT_THROW(init_network(one, std::span(&kTanh, 1), 1), DomainError);
    EXPECT_THROW(init_network(zero, std::span(&kTanh, 1), 1), DomainError);
    const std::vector<ActivationSpec> two(2);
    EXPECT_THROW(init_network(kArch, two, 1), DomainError);
}

TEST(Forward, ZeroNetworkOutputsZero) {
    const Network net = zero_network(kArch, std::span(&kTanh, 1));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 20; ++i) {
        const double in[2] = {u(gen), u(gen)};
        EXPECT_EQ(forward(net, in).output()[0], 0.0);
    }
}

TEST(Forward, SingleLayerByHand) {
    Layer l;
    l.inputs = 2;
    l.outputs = 1;
    l.weights = {1.0, 0.0};
    l.biases = {0.0};
    const Network net(2, {l});
    const double in[2] = {0.5, -0.3};
    const ForwardTrace t = forward(net, in);
    EXPECT_EQ(t.pre[0][0], 0.5);
    EXPECT_NEAR(t.output()[0], 0.462117157260009758502318483644, 1e-16);
}

TEST(Forward, PureAndShapeChecked) {
    const Network net = init_network(kArch, std::span(&kTanh, 1), 3);
    const double in[2] = {0.0, 0.0};
    const ForwardTrace a = forward(net, in);
    const ForwardTrace b = forward(net, in);
    EXPECT_EQ(a.pre, b.pre);
    EXPECT_EQ(a.post, b.post);
    ASSERT_EQ(a.pre.size(), 3u);
    EXPECT_EQ(a.pre[0].size(), 16u);
    EXPECT_EQ(a.post[2].size(), 1u);
    const double three[3] = {0, 0, 0};
    EXPECT_THROW(forward(net, three), DomainError);
}

TEST(Forward, MatchesExtendedPrecisionOracle) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Network net = init_network(kArch, std::span(&kTanh, 1), seed);
        const auto ref = oracle::LongNet::from(net);
        const double in[2] = {0.3 - 0.01 * static_cast<double>(seed), -0.2};
        EXPECT_NEAR(forward(net, in).output()[0], static_cast<double>(ref.output(in[0], in[1])), 1e-14);
    }
}

TEST(Network, ConstructorValidates) {
    Layer l;
    l.inputs = 2;
    l.outputs = 1;
    l.weights = {1.0};
    l.biases = {0.0};
    EXPECT_THROW(Network(2, {l}), DomainError);
    l.weights = {1.0, std::nan("")};
    EXPECT_THROW(Network(2, {l}), DomainError);
    l.weights = {1.0, 2.0};
    EXPECT_THROW(Network(3, {l}), DomainError);
}

TEST(Serialization, RoundTripIsBitExact) {
    const std::vector<ActivationSpec> acts{kTanh, ActivationSpec::blend(0.37, true), ActivationSpec::blend(1.0)};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Network net = init_network(kArch, acts, seed);
        const std::string text = serialize_network(net);
        EXPECT_EQ(parse_network(text), net);
        EXPECT_EQ(serialize_network(parse_network(text)), text);
    }
}

TEST(Serialization, RejectsMalformed) {
    const Network net = init_network(kArch, std::span(&kTanh, 1), 1);
    const std::string good = serialize_network(net);
    EXPECT_THROW(parse_network(""), ParseError);
    EXPECT_THROW(parse_network("interfere-network 2\n"), ParseError);
    EXPECT_THROW(parse_network("interfere-network 1\ninput_arity = 2\n"), ParseError);

    std::string bad_shape = good;
    bad_shape.replace(bad_shape.find("layer.0.outputs = 16"), 20, "layer.0.outputs = 15");
    EXPECT_THROW(parse_network(bad_shape), ParseError);

    std::string bad_number = good;
    bad_number.replace(bad_number.find("layer.1.alpha = 0"), 17, "layer.1.alpha = z");
    EXPECT_THROW(parse_network(bad_number), ParseError);
}
