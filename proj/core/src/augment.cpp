#include "nae/train/augment.hpp"

#include <cmath>
#include <vector>

namespace nae {

AugmentResult augment(const ImageGrid& image, const PointSet& points, const TrainConfig& config,
                      Rng& rng) {
    const int cs = config.crop_size;

    const double s = rng.uniform(config.scale_min, config.scale_max);
    const int new_w = std::max(cs, static_cast<int>(std::lround(image.width * s)));
    const int new_h = std::max(cs, static_cast<int>(std::lround(image.height * s)));
    // Rounding (and the crop-size floor) can nudge the axes apart, so points
    // are mapped by the realized per-axis ratios, not the drawn scale.
    const double sx = static_cast<double>(new_w) / image.width;
    const double sy = static_cast<double>(new_h) / image.height;

    ImageGrid img = resize_bilinear(image, new_w, new_h);
    std::vector<Vec2> pts;
    pts.reserve(points.size());
    for (const Vec2& p : points.points) pts.push_back({p.x * sx, p.y * sy});

    if (rng.u01() < config.flip_prob) {
        img = flip_horizontal(img);
        for (Vec2& p : pts) p.x = static_cast<double>(new_w - 1) - p.x;
    }

    const int cx = static_cast<int>(rng.uniform_int(0, new_w - cs));
    const int cy = static_cast<int>(rng.uniform_int(0, new_h - cs));
    img = crop(img, cx, cy, cs, cs);

    std::vector<Vec2> kept;
    for (const Vec2& p : pts) {
        if (p.x >= cx && p.x < cx + cs && p.y >= cy && p.y < cy + cs) {
            kept.push_back({p.x - cx, p.y - cy});
        }
    }
    return {std::move(img), PointSet::with_distances(std::move(kept))};
}

}  // namespace nae
