#include "nae/vector_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "nae/errors.hpp"
#include "wire.hpp"

namespace nae {
namespace {

constexpr char kMagic[4] = {'N', 'A', 'E', 'F'};
constexpr uint32_t kVersion = 1;
// Dimensions past this cannot be real images; rejecting them keeps the
// size arithmetic below overflow-free.
constexpr uint32_t kMaxDim = 1u << 24;

void check_planes(const VectorField& field) {
    const size_t count = static_cast<size_t>(field.width) * static_cast<size_t>(field.height);
    if (field.width < 1 || field.height < 1 || field.dx.size() != count ||
        field.dy.size() != count) {
        throw ShapeError("vector field planes do not match its dimensions");
    }
}

struct Taps {
    int x0, x1, y0, y1;
    double fx, fy;
};

Taps clamped_taps(const VectorField& field, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw Error("non-finite sample coordinate");
    }
    const double cx = std::clamp(x, 0.0, static_cast<double>(field.width - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(field.height - 1));
    Taps t;
    t.x0 = std::clamp(static_cast<int>(std::floor(cx)), 0, field.width - 1);
    t.y0 = std::clamp(static_cast<int>(std::floor(cy)), 0, field.height - 1);
    t.x1 = std::min(t.x0 + 1, field.width - 1);
    t.y1 = std::min(t.y0 + 1, field.height - 1);
    t.fx = cx - t.x0;
    t.fy = cy - t.y0;
    return t;
}

void put_plane(std::vector<unsigned char>& out, const std::vector<float>& plane) {
    for (const float v : plane) wire::put_f32(out, v);
}

void get_plane(const unsigned char* p, std::vector<float>& plane) {
    for (size_t i = 0; i < plane.size(); ++i) {
        plane[i] = std::bit_cast<float>(wire::get_u32(p + 4 * i));
    }
}

}  // namespace

Vec2 bilinear_sample(const VectorField& field, double x, double y) {
    check_planes(field);
    const Taps t = clamped_taps(field, x, y);
    const double w00 = (1.0 - t.fy) * (1.0 - t.fx);
    const double w01 = (1.0 - t.fy) * t.fx;
    const double w10 = t.fy * (1.0 - t.fx);
    const double w11 = t.fy * t.fx;
    Vec2 out;
    out.x = w00 * field.at_dx(t.y0, t.x0) + w01 * field.at_dx(t.y0, t.x1) +
            w10 * field.at_dx(t.y1, t.x0) + w11 * field.at_dx(t.y1, t.x1);
    out.y = w00 * field.at_dy(t.y0, t.x0) + w01 * field.at_dy(t.y0, t.x1) +
            w10 * field.at_dy(t.y1, t.x0) + w11 * field.at_dy(t.y1, t.x1);
    return out;
}

Vec2 sample_field(const VectorField& field, double x, double y, SampleMode mode) {
    if (mode == SampleMode::bilinear) return bilinear_sample(field, x, y);
    check_planes(field);
    const Taps t = clamped_taps(field, x, y);
    const int ix = t.fx < 0.5 ? t.x0 : t.x1;
    const int iy = t.fy < 0.5 ? t.y0 : t.y1;
    return {field.at_dx(iy, ix), field.at_dy(iy, ix)};
}

PointSet restore(const PointSet& points, const VectorField& field, SampleMode mode) {
    check_planes(field);
    const double max_x = static_cast<double>(field.width - 1);
    const double max_y = static_cast<double>(field.height - 1);
    std::vector<Vec2> moved(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        const Vec2& p = points.points[i];
        const Vec2 s = sample_field(field, p.x, p.y, mode);
        moved[i] = {std::clamp(p.x + s.x, 0.0, max_x), std::clamp(p.y + s.y, 0.0, max_y)};
    }
    return PointSet::with_distances(std::move(moved));
}

VectorField read_field(const std::vector<unsigned char>& bytes, const std::string& source) {
    if (bytes.size() < 16) throw ParseError(source, 0, "truncated header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw ParseError(source, 0, "bad magic, expected NAEF");
    }
    const uint32_t version = wire::get_u32(bytes.data() + 4);
    if (version != kVersion) {
        throw ParseError(source, 0, "unsupported version " + std::to_string(version));
    }
    const uint32_t w = wire::get_u32(bytes.data() + 8);
    const uint32_t h = wire::get_u32(bytes.data() + 12);
    if (w < 1 || h < 1 || w > kMaxDim || h > kMaxDim) {
        throw ParseError(source, 0, "implausible field dimensions");
    }
    const uint64_t count = static_cast<uint64_t>(w) * h;
    const uint64_t expected = 16 + count * 8;
    if (bytes.size() != expected) {
        throw ParseError(source, 0, "payload length mismatch: expected " +
                                        std::to_string(expected) + " bytes, got " +
                                        std::to_string(bytes.size()));
    }
    VectorField field(static_cast<int>(w), static_cast<int>(h));
    get_plane(bytes.data() + 16, field.dx);
    get_plane(bytes.data() + 16 + count * 4, field.dy);
    return field;
}

std::vector<unsigned char> write_field(const VectorField& field) {
    check_planes(field);
    std::vector<unsigned char> out;
    out.reserve(16 + field.dx.size() * 8);
    out.insert(out.end(), kMagic, kMagic + 4);
    wire::put_u32(out, kVersion);
    wire::put_u32(out, static_cast<uint32_t>(field.width));
    wire::put_u32(out, static_cast<uint32_t>(field.height));
    put_plane(out, field.dx);
    put_plane(out, field.dy);
    return out;
}

VectorField read_field_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path, "read failed");
    return read_field(bytes, path);
}

void write_field_file(const VectorField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    const std::vector<unsigned char> bytes = write_field(field);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError(path, "write failed");
}

}  // namespace nae
