#include "nae/noise.hpp"

#include <algorithm>

#include "nae/errors.hpp"

namespace nae {

OffsetSample sample_offset(Rng& rng, double radius) {
    const double angle = rng.angle();
    const double magnitude = radius * rng.u01();
    return compose_offset(angle, magnitude);
}

NoisedPointSet make_noised(const PointSet& points, const SamplingBounds& bounds, int width,
                           int height, Rng& rng) {
    if (width < 1 || height < 1) throw ShapeError("image dimensions must be positive");
    if (bounds.radius.size() != points.size()) {
        throw ShapeError("sampling bounds do not match point set");
    }

    NoisedPointSet out;
    out.noised.resize(points.size());
    out.offsets.resize(points.size());
    out.effective.resize(points.size());
    out.clamped.assign(points.size(), 0);

    const double max_x = static_cast<double>(width - 1);
    const double max_y = static_cast<double>(height - 1);
    for (size_t i = 0; i < points.size(); ++i) {
        const OffsetSample s = sample_offset(rng, bounds.radius[i]);
        const Vec2& p = points.points[i];
        const Vec2 moved{p.x + s.offset.x, p.y + s.offset.y};
        const Vec2 kept{std::clamp(moved.x, 0.0, max_x), std::clamp(moved.y, 0.0, max_y)};
        const bool clamped = kept.x != moved.x || kept.y != moved.y;
        out.offsets[i] = s;
        out.noised[i] = kept;
        // The raw draw when nothing was clipped, so the ||effective|| <= r
        // bound stays exact; the realized displacement otherwise.
        out.effective[i] = clamped ? Vec2{kept.x - p.x, kept.y - p.y} : s.offset;
        out.clamped[i] = clamped ? 1 : 0;
    }
    return out;
}

}  // namespace nae
