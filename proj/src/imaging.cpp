#include "interfere/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "interfere/errors.hpp"

namespace interfere {

RealGrid sample_generalization_raw(const Network& net, std::size_t size) {
    if (net.input_arity() != 2) {
        throw DomainError(fmt::format("sample_generalization: input arity is {}, need 2", net.input_arity()));
    }
    if (size < 2) {
        throw DomainError("sample_generalization: size must be at least 2");
    }
    std::vector<double> values(size * size);
    ForwardTrace trace;
    for (std::size_t iy = 0; iy < size; ++iy) {
        for (std::size_t ix = 0; ix < size; ++ix) {
            const Point2 p = pixel_to_coords(ix, iy, size);
            const double in[2] = {p.x, p.y};
            forward_into(net, in, trace);
            values[iy * size + ix] = trace.output()[0];
        }
    }
    return RealGrid(size, std::move(values));
}

GrayImage clamp_to_image(const RealGrid& grid) {
    std::vector<double> values(grid.values().begin(), grid.values().end());
    for (double& v : values) {
        v = std::isnan(v) ? 0.0 : std::clamp(v, -0.5, 0.5);
    }
    return GrayImage(grid.size(), std::move(values));
}

GrayImage sample_generalization(const Network& net, std::size_t size) {
    return clamp_to_image(sample_generalization_raw(net, size));
}

void DiagramStyle::validate() const {
    if (size < 2) {
        throw DomainError("diagram: size must be at least 2");
    }
    if (!(line_opacity > 0.0 && line_opacity <= 1.0)) {
        throw DomainError("diagram: line_opacity must lie in (0, 1]");
    }
    if (!(background_value >= -0.5 && background_value <= 0.5)) {
        throw DomainError("diagram: background_value must lie in [-0.5, 0.5]");
    }
    if (rectangle_dash_period == 0 || supersample_factor == 0) {
        throw DomainError("diagram: dash period and supersample factor must be positive");
    }
}

Point2 diagram_pixel_to_coords(std::size_t ix, std::size_t iy, std::size_t size) {
    const double scale = 2.0 * kDiagramHalfExtent / static_cast<double>(size - 1);
    return {-kDiagramHalfExtent + scale * static_cast<double>(ix),
            -kDiagramHalfExtent + scale * static_cast<double>(iy)};
}

namespace {

// Pixel-space line: signed distance in pixels is (a * px + b * py + c).
struct PixelLine {
    double a;
    double b;
    double c;
};

PixelLine to_pixel_space(const Hyperplane2& h, std::size_t size) {
    // x = -E + s * px  =>  w1 x + w2 y + b = s (w1 px + w2 py) + (b - E (w1 + w2)).
    const double s = 2.0 * kDiagramHalfExtent / static_cast<double>(size - 1);
    const double norm = std::hypot(h.w1, h.w2);
    return {h.w1 / norm, h.w2 / norm, (h.b - kDiagramHalfExtent * (h.w1 + h.w2)) / (s * norm)};
}

std::size_t window_index(double coord, std::size_t size) {
    const double scaled = (coord + kDiagramHalfExtent) / (2.0 * kDiagramHalfExtent) * static_cast<double>(size - 1);
    return static_cast<std::size_t>(std::llround(scaled));
}

}  // namespace

GrayImage render_hyperplane_diagram(std::span<const Hyperplane2> hs, const DiagramStyle& style) {
    style.validate();
    const std::size_t size = style.size;
    const std::size_t ss = style.supersample_factor;
    const double sub = 1.0 / static_cast<double>(ss);

    std::vector<PixelLine> lines;
    lines.reserve(hs.size());
    for (const Hyperplane2& h : hs) {
        if (!h.degenerate()) {
            lines.push_back(to_pixel_space(h, size));
        }
    }

    std::vector<double> values(size * size);
    std::vector<double> factors;
    for (std::size_t iy = 0; iy < size; ++iy) {
        for (std::size_t ix = 0; ix < size; ++ix) {
            factors.clear();
            for (const PixelLine& l : lines) {
                const double centre = l.a * static_cast<double>(ix) + l.b * static_cast<double>(iy) + l.c;
                // A pixel farther than the half-diagonal plus half a stroke cannot be touched.
                if (std::abs(centre) > 0.5 + 0.7072) {
                    continue;
                }
                std::size_t hits = 0;
                for (std::size_t sy = 0; sy < ss; ++sy) {
                    const double oy = (static_cast<double>(sy) + 0.5) * sub - 0.5;
                    for (std::size_t sx = 0; sx < ss; ++sx) {
                        const double ox = (static_cast<double>(sx) + 0.5) * sub - 0.5;
                        if (std::abs(centre + l.a * ox + l.b * oy) <= 0.5) {
                            ++hits;
                        }
                    }
                }
                if (hits > 0) {
                    const double coverage = static_cast<double>(hits) / static_cast<double>(ss * ss);
                    factors.push_back(1.0 - style.line_opacity * coverage);
                }
            }
            // Sorted factors make the product independent of line order.
            std::sort(factors.begin(), factors.end());
            double brightness = style.background_value + 0.5;
            for (double f : factors) {
                brightness *= f;
            }
            values[iy * size + ix] = std::clamp(brightness - 0.5, -0.5, 0.5);
        }
    }

    GrayImage img(size, std::move(values));
    const std::size_t lo = window_index(-0.5, size);
    const std::size_t hi = window_index(0.5, size);
    const std::size_t period = style.rectangle_dash_period;
    for (std::size_t t = 0; t <= hi - lo; ++t) {
        if ((t / period) % 2 != 0) {
            continue;
        }
        img.set(lo + t, lo, -0.5);
        img.set(lo + t, hi, -0.5);
        img.set(lo, lo + t, -0.5);
        img.set(hi, lo + t, -0.5);
    }
    return img;
}

GrayImage variance_to_image(const RealGrid& variance) {
    const auto v = variance.values();
    const double max = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    std::vector<double> values(v.size(), -0.5);
    if (max > 0.0) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            values[i] = std::clamp(v[i] / max - 0.5, -0.5, 0.5);
        }
    }
    return GrayImage(variance.size(), std::move(values));
}

}  // namespace interfere
