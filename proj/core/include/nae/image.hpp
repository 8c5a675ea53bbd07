#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nae {

/// Grayscale image, row-major, intensities in [0, 1].
struct ImageGrid {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    ImageGrid() = default;
    ImageGrid(int w, int h, float fill = 0.0f)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    float at(int y, int x) const { return pixels[static_cast<size_t>(y) * width + x]; }
    float& at(int y, int x) { return pixels[static_cast<size_t>(y) * width + x]; }
};

/// Corner-anchored bilinear resize: output pixel (i, j) samples the input at
/// (j / sx, i / sy) with sx = new_w / w, sy = new_h / h, so a point at (x, y)
/// maps to (x * sx, y * sy).
ImageGrid resize_bilinear(const ImageGrid& image, int new_w, int new_h);

/// Mirror around the vertical axis: x -> (W - 1) - x.
ImageGrid flip_horizontal(const ImageGrid& image);

/// Copies the w x h window whose top-left corner is (x0, y0).
ImageGrid crop(const ImageGrid& image, int x0, int y0, int w, int h);

/// Parses a binary PGM ("P5") image, maxval <= 65535. Intensities are
/// normalized to [0, 1] by division by maxval.
ImageGrid read_pgm(const std::string& bytes, const std::string& source = "pgm");

/// Serializes to binary PGM with maxval 255.
std::string write_pgm(const ImageGrid& image);

ImageGrid read_pgm_file(const std::string& path);
void write_pgm_file(const ImageGrid& image, const std::string& path);

}  // namespace nae
