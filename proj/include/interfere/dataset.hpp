#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "interfere/image.hpp"

namespace interfere {

struct Observation {
    Point2 input;
    double target = 0.0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Image pixels split by a mask into the training subset and its complement.
struct Dataset {
    std::vector<Observation> training;
    std::vector<Observation> generalized;
    std::size_t source_size = 0;
};

/// Straight band of half-width `width / 2` around the infinite line through
/// `from` and `to`. When `dash_period > 0` only the part of the band whose
/// position along the line (measured from `from`) falls in the first
/// `dash_duty` fraction of each period is drawn.
struct StripeParams {
    Point2 from;
    Point2 to;
    double width = 0.08;
    double dash_period = 0.0;
    double dash_duty = 0.5;
};

struct RingParams {
    Point2 center;
    double radius = 0.25;
    double thickness = 0.08;
};

/// Shared by both generators. `supersample` = 1 gives a two-level image;
/// larger factors average an n x n sub-grid per pixel.
struct FeatureParams {
    double foreground = 0.5;
    double background = -0.5;
    int supersample = 1;
};

struct ThetaLParams {
    StripeParams solid{{-0.5, -0.3}, {0.5, 0.05}, 0.08, 0.0, 0.5};
    StripeParams dashed{{-0.3, 0.5}, {0.2, -0.5}, 0.08, 0.16, 0.5};
    FeatureParams features;
};

struct ThetaCParams {
    StripeParams solid{{-0.5, -0.3}, {0.5, 0.05}, 0.08, 0.0, 0.5};
    RingParams ring{{0.05, 0.05}, 0.28, 0.08};
    FeatureParams features;
};

/// Axis-aligned rectangle in input coordinates, inclusive of its border.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

/// A pixel is a training pixel when it lies outside `excluded` and a seeded
/// uniform draw falls below `fraction`.
struct MaskParams {
    double fraction = 0.5;
    Rect excluded{-0.05, -0.35, 0.3, 0.0};
    std::uint64_t seed = 5;
};

bool in_stripe(const StripeParams& stripe, Point2 p);
bool in_ring(const RingParams& ring, Point2 p);

GrayImage generate_theta_l(std::size_t size, const ThetaLParams& params);
GrayImage generate_theta_c(std::size_t size, const ThetaCParams& params);
MaskImage generate_mask(std::size_t size, const MaskParams& params);

Dataset build_dataset(const GrayImage& img, const MaskImage& mask);

}  // namespace interfere
