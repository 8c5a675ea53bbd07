#include "nae/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nae {
namespace {

// Uniform grid over the point bounding box. Cells are square so the ring
// lower bound (points in Chebyshev ring r are at least (r-1)*cell away)
// holds in both axes.
struct PointGrid {
    double min_x = 0.0, min_y = 0.0;
    double cell = 1.0;
    int nx = 1, ny = 1;
    std::vector<std::vector<int>> buckets;

    PointGrid(std::span<const Vec2> points) {
        double max_x = -std::numeric_limits<double>::infinity();
        double max_y = -std::numeric_limits<double>::infinity();
        min_x = std::numeric_limits<double>::infinity();
        min_y = std::numeric_limits<double>::infinity();
        for (const auto& p : points) {
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.y);
        }
        const double extent = std::max(max_x - min_x, max_y - min_y);
        const int dim = std::max<int>(1, static_cast<int>(std::floor(std::sqrt(
                                             static_cast<double>(points.size())))));
        cell = extent > 0.0 ? extent / dim : 1.0;
        nx = cell_of(max_x, min_x) + 1;
        ny = cell_of(max_y, min_y) + 1;
        buckets.resize(static_cast<size_t>(nx) * ny);
        for (size_t i = 0; i < points.size(); ++i) {
            buckets[index_of(points[i])].push_back(static_cast<int>(i));
        }
    }

    int cell_of(double v, double lo) const {
        const int c = static_cast<int>(std::floor((v - lo) / cell));
        return std::clamp(c, 0, std::numeric_limits<int>::max());
    }

    size_t index_of(const Vec2& p) const {
        const int cx = std::min(cell_of(p.x, min_x), nx - 1);
        const int cy = std::min(cell_of(p.y, min_y), ny - 1);
        return static_cast<size_t>(cy) * nx + cx;
    }
};

}  // namespace

std::optional<std::vector<double>> nearest_distances(std::span<const Vec2> points) {
    const size_t n = points.size();
    if (n < 2) return std::nullopt;

    const PointGrid grid(points);
    std::vector<double> out(n);

    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = points[i];
        const int cx = std::min(grid.cell_of(p.x, grid.min_x), grid.nx - 1);
        const int cy = std::min(grid.cell_of(p.y, grid.min_y), grid.ny - 1);
        const int max_ring = std::max(std::max(cx, grid.nx - 1 - cx),
                                      std::max(cy, grid.ny - 1 - cy));

        double best_sq = std::numeric_limits<double>::infinity();
        for (int ring = 0; ring <= max_ring; ++ring) {
            // Points in this ring or beyond are at distance >= (ring-1)*cell.
            const double reach = static_cast<double>(ring - 1) * grid.cell;
            if (ring >= 1 && best_sq <= reach * reach) break;

            const int x0 = cx - ring, x1 = cx + ring;
            const int y0 = cy - ring, y1 = cy + ring;
            const auto scan = [&](int bx, int by) {
                for (int j : grid.buckets[static_cast<size_t>(by) * grid.nx + bx]) {
                    if (static_cast<size_t>(j) == i) continue;
                    best_sq = std::min(best_sq, squared_distance(p, points[j]));
                }
            };
            for (int by = std::max(y0, 0); by <= std::min(y1, grid.ny - 1); ++by) {
                if (by == y0 || by == y1) {
                    for (int bx = std::max(x0, 0); bx <= std::min(x1, grid.nx - 1); ++bx) {
                        scan(bx, by);
                    }
                } else {
                    if (x0 >= 0) scan(x0, by);
                    if (x1 < grid.nx && x1 != x0) scan(x1, by);
                }
            }
        }
        out[i] = std::sqrt(best_sq);
    }
    return out;
}

PointSet PointSet::with_distances(std::vector<Vec2> pts) {
    PointSet set;
    set.points = std::move(pts);
    if (auto d = nearest_distances(set.points)) {
        set.nn_dist = std::move(*d);
    }
    return set;
}

}  // namespace nae
