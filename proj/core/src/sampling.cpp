#include "nae/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "nae/errors.hpp"

namespace nae {

BoundMode bound_mode_from_string(const std::string& name) {
    if (name == "perspective") return BoundMode::perspective;
    if (name == "constant") return BoundMode::constant;
    throw ConfigError("unknown bound mode '" + name + "' (expected perspective|constant)");
}

std::string to_string(BoundMode mode) {
    return mode == BoundMode::perspective ? "perspective" : "constant";
}

std::vector<double> row_cap_perspective(std::span<const Vec2> points, std::span<const double> d,
                                        int height) {
    if (points.empty()) throw ConfigError("empty point set");
    if (points.size() != d.size()) throw ShapeError("points/d length mismatch");
    if (height < 1) throw ConfigError("height must be >= 1");

    const int win = std::max(1, height / 50);

    // L has one extra seed slot at index H, the global max radius. Rows are
    // filled bottom to top; the running min keeps L non-increasing upward.
    std::vector<double> cap(static_cast<size_t>(height) + 1);
    cap[height] = *std::max_element(d.begin(), d.end());

    // The window (i - win, i + win] slides downward as i descends, so each
    // point enters once through the lower bound (y > i - win) and expires
    // once through the upper bound (y > i + win). Points sorted by y
    // descending enter and expire in order; a max-monotonic deque over that
    // order yields the window max in O(N log N + H).
    std::vector<int> order(points.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return points[a].y > points[b].y; });

    std::vector<int> deque;  // point indices in entry order, d values decreasing
    size_t head = 0;
    size_t enter = 0;
    for (int i = height - 1; i >= 0; --i) {
        while (enter < order.size() &&
               points[order[enter]].y > static_cast<double>(i) - win) {
            const double value = d[order[enter]];
            while (deque.size() > head && d[deque.back()] <= value) deque.pop_back();
            deque.push_back(order[enter]);
            ++enter;
        }
        while (deque.size() > head && points[deque[head]].y > static_cast<double>(i) + win) {
            ++head;
        }
        const double max_rad = deque.size() > head ? d[deque[head]] : cap[i + 1];
        cap[i] = std::min(max_rad, cap[i + 1]);
    }
    cap.pop_back();
    return cap;
}

std::vector<double> row_cap_constant(std::span<const double> d, int height) {
    if (d.empty()) throw ConfigError("empty point set");
    if (height < 1) throw ConfigError("height must be >= 1");

    std::vector<double> sorted(d.begin(), d.end());
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    const double median = (n % 2 == 1) ? sorted[n / 2]
                                       : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return std::vector<double>(static_cast<size_t>(height), median);
}

std::vector<double> radii(std::span<const Vec2> points, std::span<const double> d,
                          std::span<const double> row_cap, double alpha, bool allow_overlap) {
    if (points.size() != d.size()) throw ShapeError("points/d length mismatch");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (alpha > 0.5 && !allow_overlap) {
        throw ConfigError("alpha > 0.5 produces overlapping sampling regions; "
                          "pass --allow-overlap to permit it");
    }
    const int height = static_cast<int>(row_cap.size());
    if (height < 1) throw ShapeError("row_cap must cover at least one row");

    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        const int row = std::clamp(static_cast<int>(std::floor(points[i].y)), 0, height - 1);
        out[i] = alpha * std::min(d[i], row_cap[row]);
    }
    return out;
}

SamplingBounds make_bounds(const PointSet& points, int height, BoundMode mode, double alpha,
                           bool allow_overlap) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (alpha > 0.5 && !allow_overlap) {
        throw ConfigError("alpha > 0.5 produces overlapping sampling regions; "
                          "pass --allow-overlap to permit it");
    }
    SamplingBounds bounds;
    bounds.alpha = alpha;
    if (!points.has_distances()) {
        // d undefined: the image is never noised and contributes no cap stats.
        bounds.row_cap.assign(static_cast<size_t>(height), 0.0);
        bounds.radius.assign(points.size(), 0.0);
        return bounds;
    }
    bounds.row_cap = mode == BoundMode::perspective
                         ? row_cap_perspective(points.points, points.nn_dist, height)
                         : row_cap_constant(points.nn_dist, height);
    bounds.radius = radii(points.points, points.nn_dist, bounds.row_cap, alpha, allow_overlap);
    return bounds;
}

}  // namespace nae
