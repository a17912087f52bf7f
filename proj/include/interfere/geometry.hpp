#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "interfere/image.hpp"
#include "interfere/network.hpp"

namespace interfere {

/// Zero set w1 * x + w2 * y + b = 0 of a first-hidden-layer neuron's
/// pre-activation over the 2-D input plane.
struct Hyperplane2 {
    double w1 = 0.0;
    double w2 = 0.0;
    double b = 0.0;

    bool degenerate() const { return w1 == 0.0 && w2 == 0.0; }
    double eval(Point2 p) const { return w1 * p.x + w2 * p.y + b; }
};

/// One entry per first-layer neuron; std::nullopt marks a neuron whose input
/// weights are both zero (it has no zero line).
std::vector<std::optional<Hyperplane2>> first_layer_hyperplanes(const Network& net);

/// Non-degenerate entries only, in neuron order.
std::vector<Hyperplane2> valid_hyperplanes(std::span<const std::optional<Hyperplane2>> hs);

double distance_to_hyperplane(const Hyperplane2& h, Point2 p);

/// Closed band of input-space half-width `half_width` around a zero line,
/// where the neuron's activation slope stays high.
struct StrongRegionSpec {
    double half_width = 0.25;
};

bool in_strong_region(const Hyperplane2& h, Point2 p, const StrongRegionSpec& spec);

/// Pre-activation variant: |w . p + b| <= limit.
bool in_strong_region_preactivation(const Hyperplane2& h, Point2 p, double limit = 1.0);

/// |det| below this counts as parallel.
inline constexpr double kParallelDeterminant = 1e-12;

struct CrossingCounts {
    std::size_t training = 0;
    std::size_t generalized = 0;

    friend bool operator==(const CrossingCounts&, const CrossingCounts&) = default;
};

/// Every pairwise intersection inside [-0.5, 0.5]^2 is attributed to its
/// nearest grid pixel and counted by that pixel's mask class.
CrossingCounts crossings_in_region(std::span<const Hyperplane2> hs, const MaskImage& mask);

/// Fraction of generalized (mask-false) pixels lying in the strong region of
/// at least one hyperplane.
double generalized_strong_coverage(std::span<const Hyperplane2> hs, const MaskImage& mask,
                                   const StrongRegionSpec& spec);

struct RandomnessReport {
    RealGrid variance;
    double mean_training = 0.0;
    double mean_generalized = 0.0;
};

/// Per-pixel unbiased variance across replicate grids, averaged separately
/// over training and generalized pixels. The result is independent of the
/// order of `samples`.
RandomnessReport generalization_variance(std::span<const RealGrid> samples, const MaskImage& mask);
RandomnessReport generalization_variance(std::span<const GrayImage> samples, const MaskImage& mask);

}  // namespace interfere
