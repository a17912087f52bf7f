#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace interfere {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

/// Input-plane coordinates of pixel (ix, iy). Row iy = 0 is the bottom row,
/// and the corner pixels land exactly on -0.5 and +0.5.
Point2 pixel_to_coords(std::size_t ix, std::size_t iy, std::size_t size);

/// Index of the grid pixel whose coordinates are nearest to p along one axis.
/// Values outside [-0.5, 0.5] clamp to the border pixel.
std::size_t nearest_pixel_index(double coord, std::size_t size);

double brightness_to_value(std::uint8_t b);

/// Clamps to [-0.5, 0.5] and rounds half up. NaN encodes as mid-grey (128).
std::uint8_t value_to_brightness(double v);

/// Square row-major grid of unconstrained reals. Row 0 is the bottom row.
class RealGrid {
public:
    RealGrid() = default;
    RealGrid(std::size_t size, std::vector<double> values);
    RealGrid(std::size_t size, double fill);

    std::size_t size() const noexcept { return size_; }
    std::span<const double> values() const noexcept { return values_; }

    double at(std::size_t ix, std::size_t iy) const { return values_[iy * size_ + ix]; }
    double& at(std::size_t ix, std::size_t iy) { return values_[iy * size_ + ix]; }

    friend bool operator==(const RealGrid&, const RealGrid&) = default;

private:
    std::size_t size_ = 0;
    std::vector<double> values_;
};

/// Square greyscale image with every value in [-0.5, 0.5]; -0.5 is black.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(std::size_t size, std::vector<double> values);
    GrayImage(std::size_t size, double fill);

    std::size_t size() const noexcept { return size_; }
    std::span<const double> values() const noexcept { return values_; }

    double at(std::size_t ix, std::size_t iy) const { return values_[iy * size_ + ix]; }
    void set(std::size_t ix, std::size_t iy, double v);

    RealGrid to_grid() const { return RealGrid(size_, values_); }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t size_ = 0;
    std::vector<double> values_;
};

/// Training-subset selector: true marks a training pixel. Both classes must
/// be present.
class MaskImage {
public:
    MaskImage() = default;
    MaskImage(std::size_t size, std::vector<bool> flags);

    std::size_t size() const noexcept { return size_; }
    bool at(std::size_t ix, std::size_t iy) const { return flags_[iy * size_ + ix]; }
    bool at_index(std::size_t i) const { return flags_[i]; }
    std::size_t true_count() const noexcept { return true_count_; }

    /// Training pixels are black, the rest white.
    GrayImage to_image() const;

    /// Pixels darker than mid-grey become training pixels.
    static MaskImage from_image(const GrayImage& img);

    friend bool operator==(const MaskImage& a, const MaskImage& b) {
        return a.size_ == b.size_ && a.flags_ == b.flags_;
    }

private:
    std::size_t size_ = 0;
    std::vector<bool> flags_;
    std::size_t true_count_ = 0;
};

/// Binary greyscale ("P5") with maxval 255. Files store the top row first;
/// in memory row 0 is the bottom row, so both functions flip vertically.
GrayImage load_pgm(std::span<const std::uint8_t> bytes);
GrayImage load_pgm(std::string_view bytes);
std::string save_pgm(const GrayImage& img);

GrayImage read_pgm_file(const std::string& path);
void write_pgm_file(const std::string& path, const GrayImage& img);

/// Full-precision text matrix, one image row per line, top row first.
std::string format_grid(const RealGrid& grid);
RealGrid parse_grid(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace interfere
