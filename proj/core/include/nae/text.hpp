#pragma once

#include <charconv>
#include <string>

namespace nae {

/// Shortest decimal form that round-trips the exact double. Used by every
/// text artifact so reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace nae
