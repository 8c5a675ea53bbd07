#include "nae/synth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "nae/annotation_io.hpp"
#include "nae/errors.hpp"

namespace nae {
namespace {

constexpr int kMaxPlacementDraws = 10000;

std::string scene_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scene_%05d", index);
    return buf;
}

void render_gaussian(ImageGrid& img, const Vec2& c, double radius) {
    const double sigma = radius / 2.0;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    const int win = static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    const int y0 = std::max(0, static_cast<int>(c.y) - win);
    const int y1 = std::min(img.height - 1, static_cast<int>(c.y) + win);
    const int x0 = std::max(0, static_cast<int>(c.x) - win);
    const int x1 = std::min(img.width - 1, static_cast<int>(c.x) + win);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - c.x, dy = y - c.y;
            img.at(y, x) += static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv));
        }
    }
}

void render_disc(ImageGrid& img, const Vec2& c, double radius) {
    const int win = static_cast<int>(std::ceil(radius)) + 1;
    const int y0 = std::max(0, static_cast<int>(c.y) - win);
    const int y1 = std::min(img.height - 1, static_cast<int>(c.y) + win);
    const int x0 = std::max(0, static_cast<int>(c.x) - win);
    const int x1 = std::min(img.width - 1, static_cast<int>(c.x) + win);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dist = std::sqrt(squared_distance({static_cast<double>(x),
                                                            static_cast<double>(y)}, c));
            // Unit intensity inside, one-pixel soft edge.
            const double v = std::clamp(radius + 0.5 - dist, 0.0, 1.0);
            img.at(y, x) += static_cast<float>(v);
        }
    }
}

}  // namespace

LayoutMode layout_mode_from_string(const std::string& s) {
    if (s == "uniform") return LayoutMode::uniform;
    if (s == "perspective") return LayoutMode::perspective;
    throw ConfigError("unknown layout mode '" + s + "' (expected uniform or perspective)");
}

std::string to_string(LayoutMode mode) {
    return mode == LayoutMode::uniform ? "uniform" : "perspective";
}

BlobKind blob_kind_from_string(const std::string& s) {
    if (s == "gaussian") return BlobKind::gaussian;
    if (s == "disc") return BlobKind::disc;
    throw ConfigError("unknown blob kind '" + s + "' (expected gaussian or disc)");
}

std::string to_string(BlobKind kind) {
    return kind == BlobKind::gaussian ? "gaussian" : "disc";
}

void SceneSpec::validate() const {
    if (width < 8 || height < 8) throw ConfigError("scene size must be at least 8x8");
    if (min_count < 1 || max_count < min_count) {
        throw ConfigError("object count range must satisfy 1 <= min <= max");
    }
    if (!(radius > 0.0)) throw ConfigError("object radius must be positive");
    if (!(min_separation > 0.0)) throw ConfigError("min separation must be positive");
    if (layout == LayoutMode::perspective && (top_scale <= 0.0 || top_scale > 1.0)) {
        throw ConfigError("perspective top scale must be in (0, 1]");
    }
    if (background_noise < 0.0) throw ConfigError("background noise sigma must be non-negative");
}

Scene generate_scene(const SceneSpec& spec, Rng& rng) {
    spec.validate();
    const int count = static_cast<int>(rng.uniform_int(spec.min_count, spec.max_count));
    const double max_x = static_cast<double>(spec.width - 1);
    const double max_y = static_cast<double>(spec.height - 1);

    std::vector<Vec2> centers;
    std::vector<double> radii;
    centers.reserve(count);
    radii.reserve(count);
    int draws = 0;
    while (static_cast<int>(centers.size()) < count) {
        if (++draws > kMaxPlacementDraws) {
            throw PackingError("placed " + std::to_string(centers.size()) + " of " +
                               std::to_string(count) + " objects after " +
                               std::to_string(kMaxPlacementDraws) +
                               " draws; loosen separation or enlarge the scene");
        }
        const Vec2 c{rng.uniform(0.0, max_x), rng.uniform(0.0, max_y)};
        const double r = spec.radius * spec.scale_at(c.y);
        if (c.x < r || c.x > max_x - r || c.y < r || c.y > max_y - r) continue;

        bool clear = true;
        for (const Vec2& other : centers) {
            // Separation shrinks with perspective like everything else;
            // a pair is judged at its midpoint height.
            const double sep = spec.min_separation * spec.scale_at(0.5 * (c.y + other.y));
            if (squared_distance(c, other) < sep * sep) {
                clear = false;
                break;
            }
        }
        if (!clear) continue;
        centers.push_back(c);
        radii.push_back(r);
    }

    ImageGrid img(spec.width, spec.height, 0.0f);
    for (size_t i = 0; i < centers.size(); ++i) {
        if (spec.blob == BlobKind::gaussian) {
            render_gaussian(img, centers[i], radii[i]);
        } else {
            render_disc(img, centers[i], radii[i]);
        }
    }
    if (spec.background_noise > 0.0) {
        for (float& p : img.pixels) {
            p += static_cast<float>(spec.background_noise * rng.normal());
        }
    }
    for (float& p : img.pixels) p = std::clamp(p, 0.0f, 1.0f);

    return {std::move(img), PointSet::with_distances(std::move(centers))};
}

JitterResult jitter_annotations(const PointSet& centers, double beta, int width, int height,
                                Rng& rng) {
    if (beta < 0.0) throw ConfigError("jitter factor must be non-negative");
    if (!centers.has_distances()) {
        throw ConfigError("jitter requires at least two points (nearest distance undefined)");
    }
    const double max_x = static_cast<double>(width - 1);
    const double max_y = static_cast<double>(height - 1);
    JitterResult out;
    std::vector<Vec2> moved;
    moved.reserve(centers.size());
    for (size_t i = 0; i < centers.size(); ++i) {
        const double theta = rng.angle();
        const double m = beta * centers.nn_dist[i];
        const Vec2 raw{centers.points[i].x + m * std::cos(theta),
                       centers.points[i].y + m * std::sin(theta)};
        const Vec2 kept{std::clamp(raw.x, 0.0, max_x), std::clamp(raw.y, 0.0, max_y)};
        if (kept.x != raw.x || kept.y != raw.y) ++out.clamped;
        moved.push_back(kept);
    }
    out.annotations = PointSet::with_distances(std::move(moved));
    return out;
}

std::vector<SceneSample> make_scenes(int n_scenes, const SceneSpec& spec, double beta,
                                     uint64_t seed) {
    if (n_scenes < 0) throw ConfigError("scene count must be non-negative");
    spec.validate();
    if (n_scenes > 0 && spec.min_count < 2) {
        throw ConfigError("dataset scenes need at least two objects (jitter requires d)");
    }
    std::vector<SceneSample> samples;
    samples.reserve(static_cast<size_t>(n_scenes));
    for (int i = 0; i < n_scenes; ++i) {
        Rng scene_rng(derive_stream(seed, stream::kScene, static_cast<uint64_t>(i)));
        Scene scene = generate_scene(spec, scene_rng);
        Rng jitter_rng(derive_stream(seed, stream::kJitter, static_cast<uint64_t>(i)));
        JitterResult jit =
            jitter_annotations(scene.centers, beta, spec.width, spec.height, jitter_rng);
        samples.push_back({std::move(scene.image), std::move(jit.annotations),
                           std::move(scene.centers), jit.clamped});
    }
    return samples;
}

DatasetManifest emit_dataset(int n_scenes, const SceneSpec& spec, double beta,
                             const std::string& out_dir, uint64_t seed) {
    const std::vector<SceneSample> samples = make_scenes(n_scenes, spec, beta, seed);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir, "cannot create directory: " + ec.message());
    const std::filesystem::path dir(out_dir);

    DatasetManifest manifest;
    manifest.n_scenes = n_scenes;
    manifest.beta = beta;
    manifest.seed = seed;
    for (int i = 0; i < n_scenes; ++i) {
        const SceneSample& sample = samples[static_cast<size_t>(i)];
        const std::string stem = scene_stem(i);
        SceneFiles files;
        files.image = stem + ".pgm";
        files.annotations = stem + ".ann.json";
        files.truth = stem + ".gt.json";
        files.n_points = static_cast<int>(sample.truth.size());
        files.clamped = sample.clamped;

        write_pgm_file(sample.image, (dir / files.image).string());
        write_annotations_file({files.image, spec.width, spec.height, sample.annotations.points},
                               (dir / files.annotations).string());
        write_annotations_file({files.image, spec.width, spec.height, sample.truth.points},
                               (dir / files.truth).string());
        manifest.scenes.push_back(std::move(files));
    }

    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError((dir / "manifest.json").string(), "cannot open for writing");
    out << write_manifest(manifest);
    if (!out) throw IoError((dir / "manifest.json").string(), "write failed");
    return manifest;
}

std::string write_manifest(const DatasetManifest& manifest) {
    nlohmann::ordered_json j;
    j["n_scenes"] = manifest.n_scenes;
    j["beta"] = manifest.beta;
    j["seed"] = manifest.seed;
    auto scenes = nlohmann::ordered_json::array();
    for (const SceneFiles& f : manifest.scenes) {
        scenes.push_back({{"image", f.image},
                          {"annotations", f.annotations},
                          {"truth", f.truth},
                          {"points", f.n_points},
                          {"clamped", f.clamped}});
    }
    j["scenes"] = std::move(scenes);
    return j.dump(2) + "\n";
}

DatasetManifest read_manifest(const std::string& text, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 0, std::string("invalid JSON: ") + e.what());
    }
    try {
        DatasetManifest m;
        m.n_scenes = j.at("n_scenes").get<int>();
        m.beta = j.at("beta").get<double>();
        m.seed = j.at("seed").get<uint64_t>();
        for (const auto& s : j.at("scenes")) {
            SceneFiles f;
            f.image = s.at("image").get<std::string>();
            f.annotations = s.at("annotations").get<std::string>();
            f.truth = s.at("truth").get<std::string>();
            f.n_points = s.at("points").get<int>();
            f.clamped = s.at("clamped").get<int>();
            m.scenes.push_back(std::move(f));
        }
        if (m.n_scenes != static_cast<int>(m.scenes.size())) {
            throw ParseError(source, 0, "scene list length does not match n_scenes");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 0, std::string("bad manifest: ") + e.what());
    }
}

DatasetManifest read_manifest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path, "read failed");
    return read_manifest(text, path);
}

}  // namespace nae
