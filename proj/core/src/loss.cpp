#include "nae/train/loss.hpp"

#include "nae/errors.hpp"

namespace nae {

double offset_loss(std::span<const Vec2> predicted, std::span<const Vec2> applied) {
    if (predicted.size() != applied.size()) throw ShapeError("offset_loss length mismatch");
    if (predicted.empty()) throw ShapeError("offset_loss requires at least one point");
    double acc = 0.0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        const double ex = predicted[i].x + applied[i].x;
        const double ey = predicted[i].y + applied[i].y;
        acc += ex * ex + ey * ey;
    }
    return acc / static_cast<double>(predicted.size());
}

}  // namespace nae
