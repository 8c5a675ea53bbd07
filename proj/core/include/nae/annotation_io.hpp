#pragma once

#include <string>
#include <vector>

#include "nae/geometry.hpp"

namespace nae {

/// On-disk annotation record: {"image": str, "image_size": [W,H],
/// "points": [[x,y],...]}. Points must lie inside [0,W) x [0,H).
struct AnnotationFile {
    std::string image_ref;
    int width = 0;
    int height = 0;
    std::vector<Vec2> points;

    bool operator==(const AnnotationFile&) const = default;
};

/// Parses annotation JSON. Malformed text, out-of-bounds points and NaN
/// coordinates raise ParseError with the offending line number.
AnnotationFile read_annotations(const std::string& text, const std::string& source = "annotations");

/// Serializes with full round-trip precision; parse(write(a)) == a.
std::string write_annotations(const AnnotationFile& file);

AnnotationFile read_annotations_file(const std::string& path);
void write_annotations_file(const AnnotationFile& file, const std::string& path);

}  // namespace nae
