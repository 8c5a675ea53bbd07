#include "nae/annotation_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nae/errors.hpp"
#include "nae/text.hpp"

namespace nae {
namespace {

int line_of_offset(const std::string& text, size_t offset) {
    int line = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

// Line number of each element of the "points" array, for error reporting.
// Best effort: returns an empty vector when the layout cannot be traced.
std::vector<int> point_lines(const std::string& text) {
    const size_t key = text.find("\"points\"");
    if (key == std::string::npos) return {};
    size_t pos = text.find('[', key);
    if (pos == std::string::npos) return {};

    std::vector<int> lines;
    int line = line_of_offset(text, pos);
    int depth = 1;
    bool in_string = false;
    for (++pos; pos < text.size() && depth > 0; ++pos) {
        const char c = text[pos];
        if (c == '\n') ++line;
        if (in_string) {
            if (c == '\\') ++pos;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '[') {
            if (++depth == 2) lines.push_back(line);
        } else if (c == ']') {
            --depth;
        }
    }
    return lines;
}

int line_for_point(const std::vector<int>& lines, size_t index) {
    return index < lines.size() ? lines[index] : 0;
}

}  // namespace

AnnotationFile read_annotations(const std::string& text, const std::string& source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, line_of_offset(text, e.byte), e.what());
    }
    if (!doc.is_object()) throw ParseError(source, 1, "expected a JSON object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "image" && key != "image_size" && key != "points") {
            throw ParseError(source, 1, "unknown key '" + key + "'");
        }
    }
    if (!doc.contains("image") || !doc["image"].is_string()) {
        throw ParseError(source, 1, "missing or non-string 'image'");
    }
    if (!doc.contains("image_size") || !doc["image_size"].is_array() ||
        doc["image_size"].size() != 2 || !doc["image_size"][0].is_number_integer() ||
        !doc["image_size"][1].is_number_integer()) {
        throw ParseError(source, 1, "'image_size' must be [W, H] integers");
    }
    if (!doc.contains("points") || !doc["points"].is_array()) {
        throw ParseError(source, 1, "missing or non-array 'points'");
    }

    AnnotationFile file;
    file.image_ref = doc["image"].get<std::string>();
    file.width = doc["image_size"][0].get<int>();
    file.height = doc["image_size"][1].get<int>();
    if (file.width < 1 || file.height < 1) {
        throw ParseError(source, 1, "non-positive image_size");
    }

    const std::vector<int> lines = point_lines(text);
    const auto& pts = doc["points"];
    file.points.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto& e = pts[i];
        const int line = line_for_point(lines, i);
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ParseError(source, line,
                             "point " + std::to_string(i) + " must be [x, y] numbers");
        }
        const double x = e[0].get<double>();
        const double y = e[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw ParseError(source, line,
                             "point " + std::to_string(i) + " has non-finite coordinates");
        }
        if (x < 0.0 || x >= file.width || y < 0.0 || y >= file.height) {
            std::ostringstream msg;
            msg << "point " << i << " (" << x << ", " << y << ") outside image bounds "
                << file.width << "x" << file.height;
            throw ParseError(source, line, msg.str());
        }
        file.points.push_back({x, y});
    }
    return file;
}

std::string write_annotations(const AnnotationFile& file) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"image\": " << nlohmann::json(file.image_ref).dump() << ",\n";
    out << "  \"image_size\": [" << file.width << ", " << file.height << "],\n";
    if (file.points.empty()) {
        out << "  \"points\": []\n";
    } else {
        out << "  \"points\": [\n";
        for (size_t i = 0; i < file.points.size(); ++i) {
            out << "    [" << format_double(file.points[i].x) << ", "
                << format_double(file.points[i].y) << "]";
            out << (i + 1 < file.points.size() ? ",\n" : "\n");
        }
        out << "  ]\n";
    }
    out << "}\n";
    return out.str();
}

AnnotationFile read_annotations_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_annotations(buf.str(), path);
}

void write_annotations_file(const AnnotationFile& file, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    const std::string text = write_annotations(file);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(path, "write failed");
}

}  // namespace nae
