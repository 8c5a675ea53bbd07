#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nae/geometry.hpp"

namespace nae {

/// Dense 2-channel offset field over an image grid. dx and dy are row-major
/// planes of the same spatial size as the source image, in pixels.
struct VectorField {
    int width = 0;
    int height = 0;
    std::vector<float> dx;
    std::vector<float> dy;

    VectorField() = default;
    VectorField(int w, int h)
        : width(w),
          height(h),
          dx(static_cast<size_t>(w) * static_cast<size_t>(h), 0.0f),
          dy(static_cast<size_t>(w) * static_cast<size_t>(h), 0.0f) {}

    float& at_dx(int y, int x) { return dx[static_cast<size_t>(y) * width + x]; }
    float& at_dy(int y, int x) { return dy[static_cast<size_t>(y) * width + x]; }
    float at_dx(int y, int x) const { return dx[static_cast<size_t>(y) * width + x]; }
    float at_dy(int y, int x) const { return dy[static_cast<size_t>(y) * width + x]; }
};

enum class SampleMode {
    bilinear,  // default: blend of the 4 surrounding cells
    nearest,   // ablation: value of the nearest cell
};

/// Samples both channels at a continuous coordinate. Coordinates outside
/// [0, W-1] x [0, H-1] are clamped to the border before interpolation.
Vec2 bilinear_sample(const VectorField& field, double x, double y);

Vec2 sample_field(const VectorField& field, double x, double y,
                  SampleMode mode = SampleMode::bilinear);

/// Moves every point by the field value sampled at its own coordinates,
/// clamps the result in-bounds, and recomputes nearest-neighbor distances.
PointSet restore(const PointSet& points, const VectorField& field,
                 SampleMode mode = SampleMode::bilinear);

/// Binary field serialization: 16-byte header (magic "NAEF", u32 LE version,
/// u32 LE width, u32 LE height) followed by the dx plane then the dy plane,
/// each H*W little-endian f32 row-major. Round trips are bit-exact.
VectorField read_field(const std::vector<unsigned char>& bytes, const std::string& source);
std::vector<unsigned char> write_field(const VectorField& field);
VectorField read_field_file(const std::string& path);
void write_field_file(const VectorField& field, const std::string& path);

}  // namespace nae
