#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>

#include "interfere/errors.hpp"
#include "interfere/image.hpp"

using namespace interfere;

namespace {

std::string canonical_pgm(std::size_t size, const std::vector<std::uint8_t>& bytes) {
    std::string s = "P5\n" + std::to_string(size) + " " + std::to_string(size) + "\n255\n";
    s.append(bytes.begin(), bytes.end());
    return s;
}

}  // namespace

TEST(PixelToCoords, CornersAreExact) {
    EXPECT_EQ(pixel_to_coords(0, 0, 64), (Point2{-0.5, -0.5}));
    EXPECT_EQ(pixel_to_coords(63, 63, 64), (Point2{0.5, 0.5}));
}

TEST(PixelToCoords, CentrePixel) {
    // 31/63 - 1/2 = -1/126; the division rounds near 0.49, so allow half an
    // ulp of that magnitude.
    const Point2 p = pixel_to_coords(31, 31, 64);
    EXPECT_NEAR(p.x, -0.00793650793650793651, 3e-17);
    EXPECT_NEAR(p.y, -0.00793650793650793651, 3e-17);
}

TEST(PixelToCoords, RejectsOutOfRange) {
    EXPECT_THROW(pixel_to_coords(64, 0, 64), DomainError);
    EXPECT_THROW(pixel_to_coords(0, 64, 64), DomainError);
    EXPECT_THROW(pixel_to_coords(0, 0, 1), DomainError);
}

TEST(PixelToCoords, InjectiveAndInsideUnitSquare) {
    std::set<std::pair<double, double>> seen;
    for (std::size_t iy = 0; iy < 64; ++iy) {
        for (std::size_t ix = 0; ix < 64; ++ix) {
            const Point2 p = pixel_to_coords(ix, iy, 64);
            EXPECT_GE(p.x, -0.5);
            EXPECT_LE(p.x, 0.5);
            EXPECT_GE(p.y, -0.5);
            EXPECT_LE(p.y, 0.5);
            seen.emplace(p.x, p.y);
            EXPECT_EQ(nearest_pixel_index(p.x, 64), ix);
            EXPECT_EQ(nearest_pixel_index(p.y, 64), iy);
        }
    }
    EXPECT_EQ(seen.size(), 64u * 64u);
}

TEST(Brightness, Endpoints) {
    EXPECT_EQ(brightness_to_value(0), -0.5);
    EXPECT_EQ(brightness_to_value(255), 0.5);
    EXPECT_NEAR(brightness_to_value(128), 1.0 / 510.0, 6e-17);  // 128/255 rounds near 0.5
    EXPECT_EQ(value_to_brightness(-0.5), 0);
    EXPECT_EQ(value_to_brightness(0.5), 255);
    EXPECT_EQ(value_to_brightness(0.7), 255);
    EXPECT_EQ(value_to_brightness(-3.0), 0);
    EXPECT_EQ(value_to_brightness(0.0), 128);
}

TEST(Brightness, QuantizationErrorBounded) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const double v = dist(gen);
        const double back = brightness_to_value(value_to_brightness(v));
        EXPECT_LE(std::abs(back - std::clamp(v, -0.5, 0.5)), 1.0 / 510.0 + 1e-15) << v;
    }
    for (int b = 0; b < 256; ++b) {
        EXPECT_EQ(value_to_brightness(brightness_to_value(static_cast<std::uint8_t>(b))), b);
    }
}

TEST(Pgm, LoadsEndpointBytesBottomRowFirst) {
    const GrayImage img = load_pgm(canonical_pgm(2, {0, 255, 0, 255}));
    ASSERT_EQ(img.size(), 2u);
    EXPECT_EQ(img.at(0, 0), -0.5);
    EXPECT_EQ(img.at(1, 0), 0.5);
    EXPECT_EQ(img.at(0, 1), -0.5);
    EXPECT_EQ(img.at(1, 1), 0.5);

    // First file row is the top of the image.
    const GrayImage flipped = load_pgm(canonical_pgm(2, {0, 0, 255, 255}));
    EXPECT_EQ(flipped.at(0, 1), -0.5);
    EXPECT_EQ(flipped.at(0, 0), 0.5);
}

TEST(Pgm, SaveEncodesLevels) {
    const std::string zero = save_pgm(GrayImage(2, 0.0));
    EXPECT_EQ(zero, canonical_pgm(2, {128, 128, 128, 128}));
    EXPECT_EQ(save_pgm(GrayImage(2, -0.5)), canonical_pgm(2, {0, 0, 0, 0}));
    EXPECT_EQ(save_pgm(GrayImage(2, 0.5)), canonical_pgm(2, {255, 255, 255, 255}));
}

TEST(Pgm, RoundTripRandomFiles) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t size = 1 + gen() % 40;
        std::vector<std::uint8_t> bytes(size * size);
        for (auto& b : bytes) {
            b = static_cast<std::uint8_t>(gen());
        }
        const std::string file = canonical_pgm(size, bytes);
        const GrayImage img = load_pgm(file);
        EXPECT_EQ(save_pgm(img), file);
        EXPECT_EQ(load_pgm(save_pgm(img)), img);
    }
}

TEST(Pgm, AcceptsCommentsAndLooseWhitespace) {
    std::string s = "P5 # made by hand\n# another\n2\t2 # dims\n255\n";
    s += std::string("\x00\xff\x00\xff", 4);
    const GrayImage img = load_pgm(s);
    EXPECT_EQ(save_pgm(img), canonical_pgm(2, {0, 255, 0, 255}));
}

TEST(Pgm, TruncatedPayload) {
    std::string s = "P5\n64 64\n255\n" + std::string(100, '\x10');
    try {
        load_pgm(s);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos) << e.what();
    }
}

TEST(Pgm, MalformedInputsNameTheDefect) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"", "empty"},
        {"P2\n2 2\n255\n0000", "magic"},
        {"P5\n", "missing width"},
        {"P5\nx 2\n255\n", "width is not"},
        {"P5\n0 0\n255\n", "zero dimension"},
        {"P5\n2 3\n255\n123456", "non-square"},
        {"P5\n2 2\n65535\n12345678", "maxval"},
        {"P5\n2 2\n255", "whitespace after maxval"},
        {"P5\n2 2\n255\n123", "truncated"},
        {"P5\n2 2\n255\n12345", "trailing"},
    };
    for (const auto& [input, needle] : cases) {
        try {
            load_pgm(input);
            ADD_FAILURE() << "accepted malformed input expecting '" << needle << "'";
        } catch (const ParseError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    }
}

TEST(GrayImage, EnforcesRange) {
    EXPECT_THROW(GrayImage(2, std::vector<double>{0.0, 0.6, 0.0, 0.0}), DomainError);
    EXPECT_THROW(GrayImage(2, std::vector<double>{0.0, 0.0, 0.0}), DomainError);
    EXPECT_THROW(GrayImage(2, std::nan("")), DomainError);
    GrayImage img(2, 0.0);
    EXPECT_THROW(img.set(0, 0, -0.51), DomainError);
}

TEST(MaskImage, NeedsBothClasses) {
    EXPECT_THROW(MaskImage(2, std::vector<bool>(4, true)), DomainError);
    EXPECT_THROW(MaskImage(2, std::vector<bool>(4, false)), DomainError);
    const MaskImage m(2, {true, false, false, false});
    EXPECT_EQ(m.true_count(), 1u);
    EXPECT_EQ(MaskImage::from_image(m.to_image()), m);
}

TEST(Grid, TextRoundTripIsBitExact) {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> dist(0.0, 3.0);
    std::vector<double> v(49);
    for (double& x : v) {
        x = dist(gen);
    }
    const RealGrid g(7, v);
    EXPECT_EQ(parse_grid(format_grid(g)), g);
    EXPECT_THROW(parse_grid("1 2\n3\n"), ParseError);
}
