#pragma once

#include <span>

#include "nae/geometry.hpp"

namespace nae {

/// Denoising objective for one image: mean over points of the squared norm
/// of (predicted - target), where the target is the NEGATED applied offset.
/// ||o_hat + o||^2 summed per point, averaged over N. The differentiable
/// twin of this lives in the tape op offset_mse; this one is the plain
/// number used in tests and reporting.
double offset_loss(std::span<const Vec2> predicted, std::span<const Vec2> applied);

}  // namespace nae
