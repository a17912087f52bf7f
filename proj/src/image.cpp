#include "interfere/image.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "interfere/errors.hpp"

namespace interfere {

Point2 pixel_to_coords(std::size_t ix, std::size_t iy, std::size_t size) {
    if (size < 2) {
        throw DomainError("pixel_to_coords: size must be at least 2");
    }
    if (ix >= size || iy >= size) {
        throw DomainError(fmt::format("pixel_to_coords: pixel ({}, {}) outside {}x{} grid", ix, iy,
                                      size, size));
    }
    const double denom = static_cast<double>(size - 1);
    return {static_cast<double>(ix) / denom - 0.5, static_cast<double>(iy) / denom - 0.5};
}

std::size_t nearest_pixel_index(double coord, std::size_t size) {
    const double scaled = (coord + 0.5) * static_cast<double>(size - 1);
    const double r = std::floor(scaled + 0.5);
    if (!(r > 0.0)) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(r), size - 1);
}

double brightness_to_value(std::uint8_t b) { return static_cast<double>(b) / 255.0 - 0.5; }

std::uint8_t value_to_brightness(double v) {
    if (std::isnan(v)) {
        return 128;
    }
    const double c = std::clamp(v, -0.5, 0.5);
    return static_cast<std::uint8_t>(std::floor((c + 0.5) * 255.0 + 0.5));
}

// RealGrid -------------------------------------------------------------------

RealGrid::RealGrid(std::size_t size, std::vector<double> values)
    : size_(size), values_(std::move(values)) {
    if (size == 0 || values_.size() != size * size) {
        throw DomainError(fmt::format("RealGrid: expected {} values for size {}, got {}",
                                      size * size, size, values_.size()));
    }
}

RealGrid::RealGrid(std::size_t size, double fill) : RealGrid(size, std::vector<double>(size * size, fill)) {}

// GrayImage ------------------------------------------------------------------

namespace {

void check_gray_value(double v) {
    if (!(v >= -0.5 && v <= 0.5)) {
        throw DomainError(fmt::format("GrayImage: value {} outside [-0.5, 0.5]", v));
    }
}

}  // namespace

GrayImage::GrayImage(std::size_t size, std::vector<double> values)
    : size_(size), values_(std::move(values)) {
    if (size == 0 || values_.size() != size * size) {
        throw DomainError(fmt::format("GrayImage: expected {} values for size {}, got {}",
                                      size * size, size, values_.size()));
    }
    std::for_each(values_.begin(), values_.end(), check_gray_value);
}

GrayImage::GrayImage(std::size_t size, double fill) : GrayImage(size, std::vector<double>(size * size, fill)) {}

void GrayImage::set(std::size_t ix, std::size_t iy, double v) {
    check_gray_value(v);
    values_[iy * size_ + ix] = v;
}

// MaskImage ------------------------------------------------------------------

MaskImage::MaskImage(std::size_t size, std::vector<bool> flags) : size_(size), flags_(std::move(flags)) {
    if (size == 0 || flags_.size() != size * size) {
        throw DomainError(fmt::format("MaskImage: expected {} flags for size {}, got {}", size * size,
                                      size, flags_.size()));
    }
    true_count_ = static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), true));
    if (true_count_ == 0) {
        throw DomainError("MaskImage: no training pixels");
    }
    if (true_count_ == flags_.size()) {
        throw DomainError("MaskImage: no generalized pixels");
    }
}

GrayImage MaskImage::to_image() const {
    std::vector<double> values(flags_.size());
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        values[i] = flags_[i] ? -0.5 : 0.5;
    }
    return GrayImage(size_, std::move(values));
}

MaskImage MaskImage::from_image(const GrayImage& img) {
    std::vector<bool> flags(img.values().size());
    for (std::size_t i = 0; i < flags.size(); ++i) {
        flags[i] = img.values()[i] < 0.0;
    }
    return MaskImage(img.size(), std::move(flags));
}

// PGM ------------------------------------------------------------------------

namespace {

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    static bool is_space(std::uint8_t c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    }

    // Skips whitespace and '#' comments; returns false at end of input.
    bool skip_separators() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (is_space(c)) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') {
                    ++pos_;
                }
            } else {
                return true;
            }
        }
        return false;
    }

    std::size_t number(const char* field) {
        if (!skip_separators()) {
            throw ParseError(fmt::format("pgm: missing {}", field));
        }
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            ++pos_;
        }
        if (pos_ == start) {
            throw ParseError(fmt::format("pgm: {} is not a decimal number", field));
        }
        if (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') {
            throw ParseError(fmt::format("pgm: {} is not a decimal number", field));
        }
        if (pos_ - start > 9) {
            throw ParseError(fmt::format("pgm: {} too large", field));
        }
        std::size_t value = 0;
        for (std::size_t i = start; i < pos_; ++i) {
            value = value * 10 + (bytes_[i] - '0');
        }
        return value;
    }

    std::size_t pos() const { return pos_; }
    void advance() { ++pos_; }
    bool at_end() const { return pos_ >= bytes_.size(); }
    std::uint8_t peek() const { return bytes_[pos_]; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) {
        throw ParseError("pgm: empty input");
    }
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw ParseError("pgm: bad magic number (expected P5)");
    }
    HeaderReader reader(bytes.subspan(2));
    if (!reader.at_end() && !HeaderReader::is_space(reader.peek()) && reader.peek() != '#') {
        throw ParseError("pgm: bad magic number (expected P5)");
    }
    const std::size_t width = reader.number("width");
    const std::size_t height = reader.number("height");
    const std::size_t maxval = reader.number("maxval");
    if (width == 0 || height == 0) {
        throw ParseError("pgm: zero dimension");
    }
    if (width != height) {
        throw ParseError(fmt::format("pgm: non-square dimensions {}x{}", width, height));
    }
    if (maxval != 255) {
        throw ParseError(fmt::format("pgm: unsupported maxval {} (expected 255)", maxval));
    }
    if (reader.at_end() || !HeaderReader::is_space(reader.peek())) {
        throw ParseError("pgm: missing whitespace after maxval");
    }
    reader.advance();

    const std::size_t offset = 2 + reader.pos();
    const std::size_t expected = width * height;
    const std::size_t available = bytes.size() - offset;
    if (available < expected) {
        throw ParseError(fmt::format("pgm: truncated payload ({} of {} bytes)", available, expected));
    }
    if (available > expected) {
        throw ParseError(fmt::format("pgm: trailing data ({} extra bytes)", available - expected));
    }

    const std::size_t size = width;
    std::vector<double> values(expected);
    for (std::size_t row = 0; row < size; ++row) {
        const std::size_t iy = size - 1 - row;
        for (std::size_t ix = 0; ix < size; ++ix) {
            values[iy * size + ix] = brightness_to_value(bytes[offset + row * size + ix]);
        }
    }
    return GrayImage(size, std::move(values));
}

GrayImage load_pgm(std::string_view bytes) {
    return load_pgm(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(bytes.data()),
                                                  bytes.size()));
}

std::string save_pgm(const GrayImage& img) {
    const std::size_t size = img.size();
    std::string out = fmt::format("P5\n{} {}\n255\n", size, size);
    const std::size_t header = out.size();
    out.resize(header + size * size);
    for (std::size_t row = 0; row < size; ++row) {
        const std::size_t iy = size - 1 - row;
        for (std::size_t ix = 0; ix < size; ++ix) {
            out[header + row * size + ix] = static_cast<char>(value_to_brightness(img.at(ix, iy)));
        }
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path, "cannot open for reading");
    }
    std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) {
        throw IoError(path, "read failed");
    }
    return contents;
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path, "cannot open for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.close();
    if (!out) {
        throw IoError(path, "write failed");
    }
}

GrayImage read_pgm_file(const std::string& path) {
    const std::string bytes = read_file(path);
    try {
        return load_pgm(bytes);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path, e.what()));
    }
}

void write_pgm_file(const std::string& path, const GrayImage& img) { write_file(path, save_pgm(img)); }

std::string format_grid(const RealGrid& grid) {
    std::string out;
    const std::size_t size = grid.size();
    for (std::size_t row = 0; row < size; ++row) {
        const std::size_t iy = size - 1 - row;
        for (std::size_t ix = 0; ix < size; ++ix) {
            if (ix > 0) {
                out += ' ';
            }
            fmt::format_to(std::back_inserter(out), "{:.17g}", grid.at(ix, iy));
        }
        out += '\n';
    }
    return out;
}

RealGrid parse_grid(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        std::vector<double> row;
        const char* p = line.data();
        const char* last = line.data() + line.size();
        while (p < last) {
            while (p < last && (*p == ' ' || *p == '\t' || *p == '\r')) {
                ++p;
            }
            if (p == last) {
                break;
            }
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, last, v);
            if (ec != std::errc()) {
                throw ParseError(fmt::format("grid: bad number on row {}", rows.size()));
            }
            row.push_back(v);
            p = next;
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    const std::size_t size = rows.size();
    if (size == 0) {
        throw ParseError("grid: empty matrix");
    }
    std::vector<double> values(size * size);
    for (std::size_t row = 0; row < size; ++row) {
        if (rows[row].size() != size) {
            throw ParseError(fmt::format("grid: row {} has {} entries, expected {}", row,
                                         rows[row].size(), size));
        }
        const std::size_t iy = size - 1 - row;
        std::copy(rows[row].begin(), rows[row].end(), values.begin() + static_cast<std::ptrdiff_t>(iy * size));
    }
    return RealGrid(size, std::move(values));
}

}  // namespace interfere
