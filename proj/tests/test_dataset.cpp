#include <gtest/gtest.h>

#include <set>

#include "interfere/dataset.hpp"
#include "interfere/errors.hpp"
#include "oracles.hpp"

using namespace interfere;

namespace {

bool within_band(Point2 p, const StripeParams& s) {
    return oracle::point_line_distance(p, s.from, s.to) <= 0.5 * s.width + 1e-12;
}

bool within_annulus(Point2 p, const RingParams& r) {
    const double d = std::sqrt((p.x - r.center.x) * (p.x - r.center.x) + (p.y - r.center.y) * (p.y - r.center.y));
    return std::abs(d - r.radius) <= 0.5 * r.thickness + 1e-12;
}

}  // namespace

TEST(ThetaL, BrightPixelsLieInStripeBands) {
    const ThetaLParams params;
    const GrayImage img = generate_theta_l(64, params);
    std::size_t bright = 0;
    std::size_t dark_in_dash_band = 0;
    for (std::size_t iy = 0; iy < 64; ++iy) {
        for (std::size_t ix = 0; ix < 64; ++ix) {
            const Point2 p = pixel_to_coords(ix, iy, 64);
            if (img.at(ix, iy) > -0.5) {
                ++bright;
                EXPECT_TRUE(within_band(p, params.solid) || within_band(p, params.dashed)) << ix << "," << iy;
            } else {
                EXPECT_FALSE(within_band(p, params.solid)) << ix << "," << iy;
                if (within_band(p, params.dashed)) {
                    ++dark_in_dash_band;
                }
            }
        }
    }
    EXPECT_GT(bright, 100u);
    // Gaps between dashes leave dark pixels inside the dashed band.
    EXPECT_GT(dark_in_dash_band, 20u);
}

TEST(ThetaL, TwoLevelWithoutSupersampling) {
    const GrayImage img = generate_theta_l(64, ThetaLParams{});
    const std::set<double> levels(img.values().begin(), img.values().end());
    EXPECT_EQ(levels, (std::set<double>{-0.5, 0.5}));

    ThetaLParams aa;
    aa.features.supersample = 4;
    const GrayImage smooth = generate_theta_l(64, aa);
    const std::set<double> many(smooth.values().begin(), smooth.values().end());
    EXPECT_GT(many.size(), 2u);
}

TEST(ThetaL, DeterministicAndValidated) {
    EXPECT_EQ(generate_theta_l(64, ThetaLParams{}), generate_theta_l(64, ThetaLParams{}));
    ThetaLParams bad;
    bad.solid.width = 0.0;
    EXPECT_THROW(generate_theta_l(64, bad), DomainError);
    EXPECT_THROW(generate_theta_l(4, ThetaLParams{}), DomainError);
}

TEST(ThetaC, BrightPixelsLieInStripeOrRing) {
    const ThetaCParams params;
    const GrayImage img = generate_theta_c(64, params);
    std::size_t bright = 0;
    for (std::size_t iy = 0; iy < 64; ++iy) {
        for (std::size_t ix = 0; ix < 64; ++ix) {
            const Point2 p = pixel_to_coords(ix, iy, 64);
            const bool expected = within_band(p, params.solid) || within_annulus(p, params.ring);
            EXPECT_EQ(img.at(ix, iy) > -0.5, expected) << ix << "," << iy;
            bright += expected ? 1 : 0;
        }
    }
    EXPECT_GT(bright, 200u);
}

TEST(ThetaC, RingPassesThroughExpectedPixel) {
    ThetaCParams params;
    params.ring = {{0.0, 0.0}, 0.25, 0.08};
    const GrayImage img = generate_theta_c(64, params);
    // Nearest pixel to (0.25, 0): ix = round(0.75 * 63) = 47, iy = round(0.5 * 63) = 32.
    EXPECT_EQ(nearest_pixel_index(0.25, 64), 47u);
    EXPECT_EQ(nearest_pixel_index(0.0, 64), 32u);
    EXPECT_EQ(img.at(47, 32), 0.5);
}

TEST(ThetaC, DeterministicAndValidated) {
    EXPECT_EQ(generate_theta_c(64, ThetaCParams{}), generate_theta_c(64, ThetaCParams{}));
    ThetaCParams bad;
    bad.ring.radius = 0.45;
    bad.ring.thickness = 0.1;
    EXPECT_THROW(generate_theta_c(64, bad), DomainError);
}

TEST(Mask, FractionGuard) {
    MaskParams p;
    p.fraction = 1.0;
    EXPECT_THROW(generate_mask(64, p), DomainError);
    p.fraction = 0.0;
    EXPECT_THROW(generate_mask(64, p), DomainError);
}

TEST(Mask, DefaultHasBothClassesAndExcludedBlock) {
    const MaskParams params;
    const MaskImage m = generate_mask(64, params);
    EXPECT_GT(m.true_count(), 0u);
    EXPECT_LT(m.true_count(), 4096u);
    EXPECT_EQ(generate_mask(64, params), m);
    for (std::size_t iy = 0; iy < 64; ++iy) {
        for (std::size_t ix = 0; ix < 64; ++ix) {
            if (params.excluded.contains(pixel_to_coords(ix, iy, 64))) {
                EXPECT_FALSE(m.at(ix, iy));
            }
        }
    }
    // The scatter outside the block covers roughly the requested fraction.
    const double frac = static_cast<double>(m.true_count()) / 4096.0;
    EXPECT_GT(frac, 0.35);
    EXPECT_LT(frac, 0.5);
}

TEST(Mask, FeaturesCrossTheExcludedBlock) {
    const MaskParams mask;
    const ThetaLParams l;
    const ThetaCParams c;
    std::size_t solid = 0, dashed = 0, ring = 0;
    for (std::size_t iy = 0; iy < 64; ++iy) {
        for (std::size_t ix = 0; ix < 64; ++ix) {
            const Point2 p = pixel_to_coords(ix, iy, 64);
            if (!mask.excluded.contains(p)) {
                continue;
            }
            solid += in_stripe(l.solid, p);
            dashed += in_stripe(l.dashed, p);
            ring += in_ring(c.ring, p);
        }
    }
    EXPECT_GT(solid, 10u);
    EXPECT_GT(dashed, 5u);
    EXPECT_GT(ring, 10u);
}

TEST(BuildDataset, PartitionsEveryPixel) {
    std::vector<bool> flags(4096);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        flags[i] = (i % 2) == 0;
    }
    const MaskImage mask(64, flags);
    const GrayImage img = generate_theta_c(64, ThetaCParams{});
    const Dataset ds = build_dataset(img, mask);
    EXPECT_EQ(ds.training.size(), 2048u);
    EXPECT_EQ(ds.generalized.size(), 2048u);
    EXPECT_EQ(ds.source_size, 64u);

    std::set<std::pair<double, double>> coords;
    for (const auto* part : {&ds.training, &ds.generalized}) {
        for (const Observation& o : *part) {
            coords.emplace(o.input.x, o.input.y);
        }
    }
    EXPECT_EQ(coords.size(), 4096u);
}

TEST(BuildDataset, CornerObservation) {
    std::vector<double> values(64 * 64, 0.5);
    values[0] = brightness_to_value(0);
    std::vector<bool> flags(64 * 64, false);
    flags[0] = true;
    const Dataset ds = build_dataset(GrayImage(64, values), MaskImage(64, flags));
    ASSERT_EQ(ds.training.size(), 1u);
    EXPECT_EQ(ds.training[0], (Observation{{-0.5, -0.5}, -0.5}));
}

TEST(BuildDataset, SizeMismatch) {
    const MaskImage mask = generate_mask(32, MaskParams{});
    EXPECT_THROW(build_dataset(GrayImage(64, 0.0), mask), DomainError);
}
