#pragma once

#include <cstdint>
#include <vector>

#include "nae/geometry.hpp"
#include "nae/rng.hpp"
#include "nae/sampling.hpp"

namespace nae {

/// One noise offset: direction a in [0, 2*pi), magnitude m in [0, r],
/// offset == (m*cos a, m*sin a).
struct OffsetSample {
    double angle = 0.0;
    double magnitude = 0.0;
    Vec2 offset;
};

/// Composes an offset from direction and magnitude.
inline OffsetSample compose_offset(double angle, double magnitude) noexcept {
    return {angle, magnitude, {magnitude * std::cos(angle), magnitude * std::sin(angle)}};
}

/// Draws direction ~ U[0, 2*pi) and magnitude ~ U[0, r]. r == 0 yields the
/// zero offset.
OffsetSample sample_offset(Rng& rng, double radius);

/// Noised copy of a point set. `offsets` holds the raw draws; `effective`
/// the post-clamp displacement (what the restoration target is built from);
/// positions are clamped to [0, W-1] x [0, H-1] with the clamp recorded.
struct NoisedPointSet {
    std::vector<Vec2> noised;
    std::vector<OffsetSample> offsets;
    std::vector<Vec2> effective;
    std::vector<uint8_t> clamped;

    size_t size() const noexcept { return noised.size(); }
};

NoisedPointSet make_noised(const PointSet& points, const SamplingBounds& bounds, int width,
                           int height, Rng& rng);

}  // namespace nae
