#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace nae {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

inline double squared_distance(const Vec2& a, const Vec2& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(const Vec2& a, const Vec2& b) noexcept {
    return std::sqrt(squared_distance(a, b));
}

/// Per-point distance to the nearest other point in the set. Duplicates give
/// 0. Fewer than two points leave the distances undefined: returns nullopt.
std::optional<std::vector<double>> nearest_distances(std::span<const Vec2> points);

/// Image-anchored 2D point annotations with per-point nearest-neighbor
/// distances. nn_dist is empty when it is undefined (N < 2); every consumer
/// of d must go through has_distances() first.
struct PointSet {
    std::vector<Vec2> points;
    std::vector<double> nn_dist;

    /// Builds a PointSet, computing nearest-neighbor distances when N >= 2.
    static PointSet with_distances(std::vector<Vec2> pts);

    size_t size() const noexcept { return points.size(); }
    bool has_distances() const noexcept {
        return points.size() >= 2 && nn_dist.size() == points.size();
    }
};

}  // namespace nae
