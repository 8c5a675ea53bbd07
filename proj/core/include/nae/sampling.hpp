#pragma once

#include <span>
#include <string>
#include <vector>

#include "nae/geometry.hpp"

namespace nae {

enum class BoundMode {
    perspective,  // row-wise sliding-window cap, non-increasing upward
    constant,     // per-image constant cap: median of all d
};

BoundMode bound_mode_from_string(const std::string& name);
std::string to_string(BoundMode mode);

/// Per-point sampling radii r_i and the per-row cap L that bound noise
/// offsets. Invariants: row_cap[j] <= row_cap[j+1] in perspective mode;
/// radius[i] == alpha * min(d_i, row_cap[row of point i]).
struct SamplingBounds {
    double alpha = 0.4;
    std::vector<double> row_cap;  // length H
    std::vector<double> radius;   // length N
};

/// Sliding-window row cap, bottom to top, non-increasing upward.
/// Window size is max(1, H / 50); the window at row i contains points with
/// y in (i - winSize, i + winSize]. An empty window inherits the row below.
/// `d` carries each point's radius value (normally the nearest-neighbor
/// distance). Throws on an empty point set.
std::vector<double> row_cap_perspective(std::span<const Vec2> points, std::span<const double> d,
                                        int height);

/// Constant row cap: every row equals the median of d (mean of the two
/// central order statistics for even N). Throws on an empty point set.
std::vector<double> row_cap_constant(std::span<const double> d, int height);

/// r_i = alpha * min(d_i, row_cap[floor(y_i)]), row index clamped to
/// [0, H-1]. alpha must lie in (0, 0.5]; larger values (up to the overlap
/// regime) require allow_overlap.
std::vector<double> radii(std::span<const Vec2> points, std::span<const double> d,
                          std::span<const double> row_cap, double alpha,
                          bool allow_overlap = false);

/// Full bounds for one image. Points without defined nearest-neighbor
/// distances (N < 2) are never noised: all radii and caps are zero.
SamplingBounds make_bounds(const PointSet& points, int height, BoundMode mode, double alpha,
                           bool allow_overlap = false);

}  // namespace nae
