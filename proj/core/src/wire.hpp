#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "nae/errors.hpp"

// Little-endian wire helpers shared by the binary file formats. Private to
// the library sources.
namespace nae::wire {

inline void put_u32(std::vector<unsigned char>& out, uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

inline void put_u64(std::vector<unsigned char>& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v & 0xffffffffull));
    put_u32(out, static_cast<uint32_t>(v >> 32));
}

inline void put_f32(std::vector<unsigned char>& out, float v) {
    put_u32(out, std::bit_cast<uint32_t>(v));
}

inline uint32_t get_u32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

/// Bounds-checked sequential reader; every underrun is a ParseError naming
/// the source.
struct Reader {
    const std::vector<unsigned char>& bytes;
    std::string source;
    size_t pos = 0;

    void need(size_t n) const {
        if (bytes.size() - pos < n) throw ParseError(source, 0, "truncated payload");
    }
    size_t remaining() const noexcept { return bytes.size() - pos; }

    uint32_t u32() {
        need(4);
        const uint32_t v = get_u32(bytes.data() + pos);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        const uint64_t lo = u32();
        const uint64_t hi = u32();
        return lo | (hi << 32);
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string str(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), n);
        pos += n;
        return s;
    }
};

}  // namespace nae::wire
