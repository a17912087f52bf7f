#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "interfere/training.hpp"
#include "oracles.hpp"

namespace oracle {

// Visits every parameter of `net` (weights, biases, trainable alphas) with its
// analytic gradient component.
template <typename Fn>
void for_each_parameter(interfere::Network& net, const interfere::Gradients& g, Fn fn) {
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        interfere::Layer& l = net.layer(k);
        for (std::size_t i = 0; i < l.weights.size(); ++i) {
            fn(l.weights[i], g.weights[k][i]);
        }
        for (std::size_t j = 0; j < l.biases.size(); ++j) {
            fn(l.biases[j], g.biases[k][j]);
        }
        if (l.activation.kind == interfere::ActivationKind::Blend && l.activation.trainable) {
            fn(l.activation.alpha, g.alpha[k]);
        }
    }
}

// Central differences with step h, evaluated in extended precision.
inline std::size_t check_against_finite_differences(interfere::Network net, const interfere::Observation& obs, double h, double* worst,
                                                    double* worst_abs = nullptr) {
    const interfere::Gradients g = interfere::backprop(net, obs);
    std::size_t checked = 0;
    interfere::Network probe = net;
    for_each_parameter(probe, g, [&](double& param, double analytic) {
        const double saved = param;
        const double hi = saved + h;
        const double lo = saved - h;
        param = hi;
        const long double up = LongNet::from(probe).loss(obs.input.x, obs.input.y, obs.target);
        param = lo;
        const long double down = LongNet::from(probe).loss(obs.input.x, obs.input.y, obs.target);
        param = saved;
        // The realised step, exactly: both endpoints are doubles.
        const long double step = static_cast<long double>(hi) - static_cast<long double>(lo);
        const double fd = static_cast<double>((up - down) / step);
        const double diff = std::abs(analytic - fd);
        const double denom = std::max(std::abs(analytic), std::abs(fd));
        const double err = denom < 1e-10 ? 0.0 : diff / denom;
        if (worst_abs != nullptr) {
            *worst_abs = std::max(*worst_abs, diff);
        }
        if (diff > 1e-10) {
            *worst = std::max(*worst, err);
        }
        ++checked;
    });
    return checked;
}

}  // namespace oracle
