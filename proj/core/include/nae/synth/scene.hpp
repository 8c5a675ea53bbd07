#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nae/geometry.hpp"
#include "nae/image.hpp"
#include "nae/rng.hpp"

namespace nae {

enum class LayoutMode { uniform, perspective };
enum class BlobKind { gaussian, disc };

LayoutMode layout_mode_from_string(const std::string& s);
std::string to_string(LayoutMode mode);
BlobKind blob_kind_from_string(const std::string& s);
std::string to_string(BlobKind kind);

/// Synthetic counting scene. In perspective layout, object radius and the
/// required center separation both scale with g(y) = top_scale +
/// (1 - top_scale) * y / (H - 1): smaller and denser toward the top, the way
/// a tilted surveillance camera renders a crowd.
struct SceneSpec {
    int width = 64;
    int height = 64;
    int min_count = 8;
    int max_count = 16;
    BlobKind blob = BlobKind::gaussian;
    double radius = 3.0;            // object radius at the bottom row
    LayoutMode layout = LayoutMode::uniform;
    double top_scale = 0.3;         // perspective shrink factor at y = 0
    double min_separation = 8.0;    // center separation at the bottom row
    double background_noise = 0.02; // sigma of additive pixel noise

    double scale_at(double y) const noexcept {
        if (layout != LayoutMode::perspective || height <= 1) return 1.0;
        return top_scale + (1.0 - top_scale) * y / static_cast<double>(height - 1);
    }
    void validate() const;
};

struct Scene {
    ImageGrid image;
    PointSet centers;  // exact sub-pixel truth, nn_dist populated when N >= 2
};

/// Hard-core rejection sampling, then rendering (Gaussian blobs sigma = r/2
/// peak 1, or unit-intensity discs with a 1 px soft edge), then additive
/// background noise, clipped to [0, 1]. Throws PackingError when the
/// separation constraint cannot be met within 10^4 candidate draws.
Scene generate_scene(const SceneSpec& spec, Rng& rng);

struct JitterResult {
    PointSet annotations;  // nn_dist recomputed on the jittered points
    int clamped = 0;       // points pushed back in-bounds
};

/// The robustness-protocol corruption: each annotation is displaced by
/// EXACTLY beta * d_i in a uniform random direction (fixed magnitude, unlike
/// training noise which is uniform in [0, r]). Requires N >= 2 so d exists.
JitterResult jitter_annotations(const PointSet& centers, double beta, int width, int height,
                                Rng& rng);

/// One dataset entry: rendered image, the jittered annotations a consumer
/// trains on, and the hidden truth only evaluation may read.
struct SceneSample {
    ImageGrid image;
    PointSet annotations;
    PointSet truth;
    int clamped = 0;
};

/// In-memory dataset generation with per-scene substreams keyed by
/// (seed, scene index). emit_dataset writes exactly these samples, so disk
/// and in-memory datasets built from the same seed are identical.
std::vector<SceneSample> make_scenes(int n_scenes, const SceneSpec& spec, double beta,
                                     uint64_t seed);

struct SceneFiles {
    std::string image;
    std::string annotations;
    std::string truth;
    int n_points = 0;
    int clamped = 0;
};

struct DatasetManifest {
    int n_scenes = 0;
    double beta = 0.0;
    uint64_t seed = 0;
    std::vector<SceneFiles> scenes;
};

/// Writes scene_%05d.pgm / .ann.json (jittered) / .gt.json (truth) triples
/// plus manifest.json. Per-scene substreams keyed by (seed, scene index), so
/// the dataset is byte-identical across reruns.
DatasetManifest emit_dataset(int n_scenes, const SceneSpec& spec, double beta,
                             const std::string& out_dir, uint64_t seed);

/// Serialization of the manifest (shared by emit and the dataset loader).
std::string write_manifest(const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& text, const std::string& source);
DatasetManifest read_manifest_file(const std::string& path);

}  // namespace nae
