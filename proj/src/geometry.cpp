#include "interfere/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "interfere/errors.hpp"

namespace interfere {

std::vector<std::optional<Hyperplane2>> first_layer_hyperplanes(const Network& net) {
    if (net.input_arity() != 2) {
        throw DomainError(fmt::format("first_layer_hyperplanes: input arity is {}, need 2", net.input_arity()));
    }
    const Layer& l = net.layer(0);
    std::vector<std::optional<Hyperplane2>> out;
    out.reserve(l.outputs);
    for (std::size_t j = 0; j < l.outputs; ++j) {
        const Hyperplane2 h{l.weight(j, 0), l.weight(j, 1), l.biases[j]};
        out.push_back(h.degenerate() ? std::nullopt : std::optional<Hyperplane2>(h));
    }
    return out;
}

std::vector<Hyperplane2> valid_hyperplanes(std::span<const std::optional<Hyperplane2>> hs) {
    std::vector<Hyperplane2> out;
    for (const auto& h : hs) {
        if (h) {
            out.push_back(*h);
        }
    }
    return out;
}

double distance_to_hyperplane(const Hyperplane2& h, Point2 p) {
    if (h.degenerate()) {
        throw DomainError("distance_to_hyperplane: degenerate hyperplane");
    }
    return std::abs(h.eval(p)) / std::hypot(h.w1, h.w2);
}

bool in_strong_region(const Hyperplane2& h, Point2 p, const StrongRegionSpec& spec) {
    if (!(spec.half_width > 0.0)) {
        throw DomainError("in_strong_region: half_width must be positive");
    }
    return distance_to_hyperplane(h, p) <= spec.half_width;
}

bool in_strong_region_preactivation(const Hyperplane2& h, Point2 p, double limit) {
    if (h.degenerate()) {
        throw DomainError("in_strong_region_preactivation: degenerate hyperplane");
    }
    return std::abs(h.eval(p)) <= limit;
}

CrossingCounts crossings_in_region(std::span<const Hyperplane2> hs, const MaskImage& mask) {
    const std::size_t size = mask.size();
    CrossingCounts counts;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            const Hyperplane2& a = hs[i];
            const Hyperplane2& b = hs[j];
            const double det = a.w1 * b.w2 - b.w1 * a.w2;
            if (std::abs(det) < kParallelDeterminant) {
                continue;
            }
            const double x = (a.w2 * b.b - b.w2 * a.b) / det;
            const double y = (b.w1 * a.b - a.w1 * b.b) / det;
            if (!(x >= -0.5 && x <= 0.5 && y >= -0.5 && y <= 0.5)) {
                continue;
            }
            const bool training = mask.at(nearest_pixel_index(x, size), nearest_pixel_index(y, size));
            ++(training ? counts.training : counts.generalized);
        }
    }
    return counts;
}

double generalized_strong_coverage(std::span<const Hyperplane2> hs, const MaskImage& mask,
                                   const StrongRegionSpec& spec) {
    const std::size_t size = mask.size();
    std::size_t covered = 0;
    std::size_t total = 0;
    for (std::size_t iy = 0; iy < size; ++iy) {
        for (std::size_t ix = 0; ix < size; ++ix) {
            if (mask.at(ix, iy)) {
                continue;
            }
            ++total;
            const Point2 p = pixel_to_coords(ix, iy, size);
            if (std::any_of(hs.begin(), hs.end(), [&](const Hyperplane2& h) { return in_strong_region(h, p, spec); })) {
                ++covered;
            }
        }
    }
    return static_cast<double>(covered) / static_cast<double>(total);
}

RandomnessReport generalization_variance(std::span<const RealGrid> samples, const MaskImage& mask) {
    if (samples.size() < 2) {
        throw DomainError("generalization_variance: need at least 2 replicate samples");
    }
    const std::size_t size = mask.size();
    for (const RealGrid& s : samples) {
        if (s.size() != size) {
            throw DomainError(fmt::format("generalization_variance: sample size {} != mask size {}", s.size(), size));
        }
    }
    const std::size_t n = samples.size();
    const double pair_norm = static_cast<double>(n) * static_cast<double>(n - 1);

    std::vector<double> variance(size * size);
    std::vector<double> column(n);
    for (std::size_t p = 0; p < variance.size(); ++p) {
        for (std::size_t r = 0; r < n; ++r) {
            column[r] = samples[r].values()[p];
        }
        // Sorting fixes the summation order, so replicate order cannot change
        // a single bit. Unbiased variance = sum_{r<s} (x_r - x_s)^2 / (n (n-1)).
        std::sort(column.begin(), column.end());
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t s = r + 1; s < n; ++s) {
                const double d = column[r] - column[s];
                acc += d * d;
            }
        }
        variance[p] = acc / pair_norm;
    }

    double sum_t = 0.0;
    double sum_g = 0.0;
    for (std::size_t p = 0; p < variance.size(); ++p) {
        (mask.at_index(p) ? sum_t : sum_g) += variance[p];
    }
    const auto n_t = static_cast<double>(mask.true_count());
    const auto n_g = static_cast<double>(variance.size() - mask.true_count());
    return {RealGrid(size, std::move(variance)), sum_t / n_t, sum_g / n_g};
}

RandomnessReport generalization_variance(std::span<const GrayImage> samples, const MaskImage& mask) {
    std::vector<RealGrid> grids;
    grids.reserve(samples.size());
    for (const GrayImage& s : samples) {
        grids.push_back(s.to_grid());
    }
    return generalization_variance(std::span<const RealGrid>(grids), mask);
}

}  // namespace interfere
