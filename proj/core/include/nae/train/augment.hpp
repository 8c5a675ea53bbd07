#pragma once

#include "nae/geometry.hpp"
#include "nae/image.hpp"
#include "nae/rng.hpp"
#include "nae/train/config.hpp"

namespace nae {

struct AugmentResult {
    ImageGrid image;     // crop_size x crop_size
    PointSet points;     // surviving points in crop coordinates, nn_dist recomputed
};

/// Scale, maybe flip, then random crop. The scale draw is clamped up so the
/// scaled image is never smaller than the crop. Points are mapped through
/// the same transform; those falling outside the crop are dropped. The draw
/// order (scale, flip, crop x, crop y) is fixed so runs are reproducible.
AugmentResult augment(const ImageGrid& image, const PointSet& points, const TrainConfig& config,
                      Rng& rng);

}  // namespace nae
