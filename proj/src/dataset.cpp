#include "interfere/dataset.hpp"

#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "interfere/errors.hpp"
#include "interfere/random.hpp"

namespace interfere {

namespace {

void check_size(std::size_t size, const char* who) {
    if (size < 8) {
        throw DomainError(fmt::format("{}: size must be at least 8, got {}", who, size));
    }
}

void check_stripe(const StripeParams& s, const char* who) {
    if (!(s.width > 0.0)) {
        throw DomainError(fmt::format("{}: stripe width must be positive", who));
    }
    if (s.from == s.to) {
        throw DomainError(fmt::format("{}: stripe endpoints coincide", who));
    }
    if (s.dash_period < 0.0 || (s.dash_period > 0.0 && !(s.dash_duty > 0.0 && s.dash_duty <= 1.0))) {
        throw DomainError(fmt::format("{}: dash period must be >= 0 and duty in (0, 1]", who));
    }
}

void check_features(const FeatureParams& f, const char* who) {
    if (f.supersample < 1) {
        throw DomainError(fmt::format("{}: supersample must be >= 1", who));
    }
    for (double v : {f.foreground, f.background}) {
        if (!(v >= -0.5 && v <= 0.5)) {
            throw DomainError(fmt::format("{}: level {} outside [-0.5, 0.5]", who, v));
        }
    }
}

GrayImage rasterize(std::size_t size, const FeatureParams& f,
                    const std::function<bool(Point2)>& covered) {
    const int n = f.supersample;
    const double step = 1.0 / static_cast<double>(size - 1);
    std::vector<double> values(size * size);
    for (std::size_t iy = 0; iy < size; ++iy) {
        for (std::size_t ix = 0; ix < size; ++ix) {
            const Point2 c = pixel_to_coords(ix, iy, size);
            int hits = 0;
            for (int sy = 0; sy < n; ++sy) {
                for (int sx = 0; sx < n; ++sx) {
                    const double ox = ((sx + 0.5) / n - 0.5) * step;
                    const double oy = ((sy + 0.5) / n - 0.5) * step;
                    if (covered({c.x + ox, c.y + oy})) {
                        ++hits;
                    }
                }
            }
            const double coverage = static_cast<double>(hits) / (n * n);
            values[iy * size + ix] = f.background + (f.foreground - f.background) * coverage;
        }
    }
    return GrayImage(size, std::move(values));
}

}  // namespace

bool in_stripe(const StripeParams& s, Point2 p) {
    const double dx = s.to.x - s.from.x;
    const double dy = s.to.y - s.from.y;
    const double len = std::hypot(dx, dy);
    const double rx = p.x - s.from.x;
    const double ry = p.y - s.from.y;
    const double across = std::abs(dx * ry - dy * rx) / len;
    if (across > 0.5 * s.width) {
        return false;
    }
    if (s.dash_period <= 0.0) {
        return true;
    }
    const double along = (dx * rx + dy * ry) / len;
    const double phase = along / s.dash_period - std::floor(along / s.dash_period);
    return phase < s.dash_duty;
}

bool in_ring(const RingParams& ring, Point2 p) {
    const double r = std::hypot(p.x - ring.center.x, p.y - ring.center.y);
    return std::abs(r - ring.radius) <= 0.5 * ring.thickness;
}

GrayImage generate_theta_l(std::size_t size, const ThetaLParams& params) {
    check_size(size, "generate_theta_l");
    check_stripe(params.solid, "generate_theta_l");
    check_stripe(params.dashed, "generate_theta_l");
    check_features(params.features, "generate_theta_l");
    return rasterize(size, params.features, [&](Point2 p) {
        return in_stripe(params.solid, p) || in_stripe(params.dashed, p);
    });
}

GrayImage generate_theta_c(std::size_t size, const ThetaCParams& params) {
    check_size(size, "generate_theta_c");
    check_stripe(params.solid, "generate_theta_c");
    check_features(params.features, "generate_theta_c");
    const RingParams& ring = params.ring;
    if (!(ring.radius > 0.0) || !(ring.thickness > 0.0)) {
        throw DomainError("generate_theta_c: ring radius and thickness must be positive");
    }
    if (ring.radius + ring.thickness > 0.5) {
        throw DomainError("generate_theta_c: ring radius + thickness exceeds the image half-extent");
    }
    return rasterize(size, params.features, [&](Point2 p) {
        return in_stripe(params.solid, p) || in_ring(ring, p);
    });
}

MaskImage generate_mask(std::size_t size, const MaskParams& params) {
    check_size(size, "generate_mask");
    if (!(params.fraction > 0.0 && params.fraction < 1.0)) {
        throw DomainError(fmt::format("generate_mask: fraction {} outside (0, 1)", params.fraction));
    }
    Rng rng(params.seed, "mask");
    std::vector<bool> flags(size * size);
    for (std::size_t iy = 0; iy < size; ++iy) {
        for (std::size_t ix = 0; ix < size; ++ix) {
            // Draw for every pixel so the scatter does not depend on the block.
            const bool picked = rng.uniform01() < params.fraction;
            flags[iy * size + ix] = picked && !params.excluded.contains(pixel_to_coords(ix, iy, size));
        }
    }
    return MaskImage(size, std::move(flags));
}

Dataset build_dataset(const GrayImage& img, const MaskImage& mask) {
    if (img.size() != mask.size()) {
        throw DomainError(fmt::format("build_dataset: image size {} != mask size {}", img.size(),
                                      mask.size()));
    }
    const std::size_t size = img.size();
    Dataset ds;
    ds.source_size = size;
    ds.training.reserve(mask.true_count());
    ds.generalized.reserve(size * size - mask.true_count());
    for (std::size_t iy = 0; iy < size; ++iy) {
        for (std::size_t ix = 0; ix < size; ++ix) {
            Observation obs{pixel_to_coords(ix, iy, size), img.at(ix, iy)};
            (mask.at(ix, iy) ? ds.training : ds.generalized).push_back(obs);
        }
    }
    return ds;
}

}  // namespace interfere
