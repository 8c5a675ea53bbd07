#include "nae/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nae/errors.hpp"

namespace nae {
namespace {

// Reads the next header token, skipping whitespace and '#' comments.
// PGM headers are line-oriented only informally; tokens may be split
// across lines arbitrarily.
std::string next_token(const std::string& bytes, size_t& pos, const std::string& source) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    const size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw ParseError(source, 0, "truncated header");
    return bytes.substr(start, pos - start);
}

int parse_header_int(const std::string& token, const std::string& what,
                     const std::string& source) {
    size_t consumed = 0;
    long value = 0;
    try {
        value = std::stol(token, &consumed);
    } catch (const std::exception&) {
        throw ParseError(source, 0, "invalid " + what + " '" + token + "'");
    }
    if (consumed != token.size() || value < 0) {
        throw ParseError(source, 0, "invalid " + what + " '" + token + "'");
    }
    return static_cast<int>(value);
}

}  // namespace

ImageGrid resize_bilinear(const ImageGrid& image, int new_w, int new_h) {
    if (new_w < 1 || new_h < 1) throw ShapeError("resize target must be positive");
    if (new_w == image.width && new_h == image.height) return image;
    ImageGrid out(new_w, new_h);
    const double inv_sx = static_cast<double>(image.width) / new_w;
    const double inv_sy = static_cast<double>(image.height) / new_h;
    for (int y = 0; y < new_h; ++y) {
        const double sy = std::min(y * inv_sy, static_cast<double>(image.height - 1));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, image.height - 1);
        const double fy = sy - y0;
        for (int x = 0; x < new_w; ++x) {
            const double sx = std::min(x * inv_sx, static_cast<double>(image.width - 1));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, image.width - 1);
            const double fx = sx - x0;
            const double top = (1.0 - fx) * image.at(y0, x0) + fx * image.at(y0, x1);
            const double bot = (1.0 - fx) * image.at(y1, x0) + fx * image.at(y1, x1);
            out.at(y, x) = static_cast<float>((1.0 - fy) * top + fy * bot);
        }
    }
    return out;
}

ImageGrid flip_horizontal(const ImageGrid& image) {
    ImageGrid out(image.width, image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) out.at(y, x) = image.at(y, image.width - 1 - x);
    }
    return out;
}

ImageGrid crop(const ImageGrid& image, int x0, int y0, int w, int h) {
    if (w < 1 || h < 1 || x0 < 0 || y0 < 0 || x0 + w > image.width || y0 + h > image.height) {
        throw ShapeError("crop window out of bounds");
    }
    ImageGrid out(w, h);
    for (int y = 0; y < h; ++y) {
        std::copy_n(&image.pixels[static_cast<size_t>(y0 + y) * image.width + x0], w,
                    &out.pixels[static_cast<size_t>(y) * w]);
    }
    return out;
}

ImageGrid read_pgm(const std::string& bytes, const std::string& source) {
    size_t pos = 0;
    if (next_token(bytes, pos, source) != "P5") {
        throw ParseError(source, 0, "expected binary PGM magic 'P5'");
    }
    const int width = parse_header_int(next_token(bytes, pos, source), "width", source);
    const int height = parse_header_int(next_token(bytes, pos, source), "height", source);
    const int maxval = parse_header_int(next_token(bytes, pos, source), "maxval", source);
    if (width < 1 || height < 1) throw ParseError(source, 0, "non-positive image size");
    if (maxval < 1 || maxval > 65535) {
        throw ParseError(source, 0, "maxval out of range [1, 65535]: " + std::to_string(maxval));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw ParseError(source, 0, "missing separator before pixel data");
    }
    ++pos;

    const size_t count = static_cast<size_t>(width) * height;
    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    if (bytes.size() - pos < count * bytes_per_sample) {
        throw ParseError(source, 0, "truncated pixel payload");
    }

    ImageGrid image(width, height);
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    const float scale = 1.0f / static_cast<float>(maxval);
    if (bytes_per_sample == 1) {
        for (size_t i = 0; i < count; ++i) image.pixels[i] = raw[i] * scale;
    } else {
        for (size_t i = 0; i < count; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            image.pixels[i] = v * scale;
        }
    }
    return image;
}

std::string write_pgm(const ImageGrid& image) {
    std::ostringstream out;
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    std::string payload(image.pixels.size(), '\0');
    for (size_t i = 0; i < image.pixels.size(); ++i) {
        const float v = std::clamp(image.pixels[i], 0.0f, 1.0f);
        payload[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f)));
    }
    return out.str() + payload;
}

ImageGrid read_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_pgm(buf.str(), path);
}

void write_pgm_file(const ImageGrid& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    const std::string bytes = write_pgm(image);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(path, "write failed");
}

}  // namespace nae
