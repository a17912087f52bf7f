#pragma once

#include <cstddef>
#include <span>

#include "interfere/geometry.hpp"
#include "interfere/image.hpp"
#include "interfere/network.hpp"

namespace interfere {

/// Network output at every pixel of a size x size grid, unclamped.
RealGrid sample_generalization_raw(const Network& net, std::size_t size);

/// Same samples clamped to [-0.5, 0.5] for display.
GrayImage sample_generalization(const Network& net, std::size_t size);

GrayImage clamp_to_image(const RealGrid& grid);

struct DiagramStyle {
    std::size_t size = 193;
    double line_opacity = 0.35;
    double background_value = 0.5;
    std::size_t rectangle_dash_period = 4;
    std::size_t supersample_factor = 4;

    void validate() const;
};

/// Half-extent of the diagram view window, centred on the origin.
inline constexpr double kDiagramHalfExtent = 0.75;

/// Pixel (ix, iy) of a diagram maps to -0.75 + 1.5 * i / (size - 1) on each
/// axis, so the view window corners are pixel centres.
Point2 diagram_pixel_to_coords(std::size_t ix, std::size_t iy, std::size_t size);

/// Zero lines as one-pixel-wide translucent strokes over [-0.75, 0.75]^2.
/// Each line scales a pixel's brightness by (1 - opacity * coverage), where
/// coverage is the supersampled fraction of the pixel within half a pixel of
/// the line. The border of the [-0.5, 0.5]^2 data square is drawn as black
/// dashes on top.
GrayImage render_hyperplane_diagram(std::span<const Hyperplane2> hs, const DiagramStyle& style);

/// Maps [0, max] linearly onto [-0.5, 0.5]; an all-zero grid renders black.
GrayImage variance_to_image(const RealGrid& variance);

}  // namespace interfere
