#include "nae/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <utility>

#include "nae/annotation_io.hpp"
#include "nae/errors.hpp"
#include "nae/parallel.hpp"
#include "nae/vector_field.hpp"

namespace nae {

namespace fs = std::filesystem;

namespace {

PointSet load_points(const fs::path& dir, const std::string& file, int want_w, int want_h) {
    const AnnotationFile ann = read_annotations_file((dir / file).string());
    if (ann.width != want_w || ann.height != want_h) {
        throw ParseError(file, 0, "annotation size does not match the scene image");
    }
    return PointSet::with_distances(ann.points);
}

}  // namespace

std::vector<SceneSample> load_dataset(const std::string& dir) {
    const fs::path root(dir);
    const DatasetManifest manifest = read_manifest_file((root / "manifest.json").string());
    std::vector<SceneSample> scenes;
    scenes.reserve(manifest.scenes.size());
    for (const SceneFiles& files : manifest.scenes) {
        SceneSample s;
        s.image = read_pgm_file((root / files.image).string());
        s.annotations = load_points(root, files.annotations, s.image.width, s.image.height);
        s.truth = load_points(root, files.truth, s.image.width, s.image.height);
        if (static_cast<int>(s.annotations.size()) != files.n_points ||
            s.annotations.size() != s.truth.size()) {
            throw ParseError(files.annotations, 0, "point count disagrees with the manifest");
        }
        s.clamped = files.clamped;
        scenes.push_back(std::move(s));
    }
    return scenes;
}

std::vector<TrainSample> to_train_samples(std::span<const SceneSample> scenes) {
    std::vector<TrainSample> out;
    out.reserve(scenes.size());
    for (const SceneSample& s : scenes) out.push_back({s.image, s.annotations});
    return out;
}

PointSet refine_points(const UNet& net, const ImageGrid& image, const PointSet& points) {
    return restore(points, infer_field(net, image));
}

RestorationMetrics evaluate_scenes(const UNet& net, std::span<const SceneSample> scenes,
                                   MatchMode mode, int threads) {
    if (scenes.empty()) throw ConfigError("nothing to evaluate");
    struct SceneErrors {
        std::vector<double> before, after;
    };
    std::vector<SceneErrors> per_scene(scenes.size());
    parallel_for(static_cast<int>(scenes.size()), threads, [&](int i) {
        const SceneSample& s = scenes[static_cast<size_t>(i)];
        per_scene[static_cast<size_t>(i)] = {
            point_errors(s.annotations, s.truth, mode),
            point_errors(refine_points(net, s.image, s.annotations), s.truth, mode)};
    });
    std::vector<double> before, after;
    for (const SceneErrors& e : per_scene) {
        before.insert(before.end(), e.before.begin(), e.before.end());
        after.insert(after.end(), e.after.begin(), e.after.end());
    }
    return restoration_metrics(before, after, mode);
}

SweepDriver make_pipeline_driver(const PipelineConfig& config) {
    return [config](double beta, double alpha) -> SweepOutcome {
        TrainConfig tc = config.train;
        tc.alpha = alpha;
        const std::vector<SceneSample> scenes =
            make_scenes(config.n_scenes, config.scene, beta, tc.seed);
        const TrainResult result = train(to_train_samples(scenes), config.model, tc, config.log);
        SweepOutcome out;
        for (const EpochMetrics& m : result.history) {
            if (!std::isfinite(m.mean_loss)) {
                out.flag = "diverged";
                break;
            }
        }
        out.metrics = evaluate_scenes(result.state.net, scenes, config.mode, config.threads);
        return out;
    };
}

std::vector<ReportRow> robustness_sweep(std::span<const double> betas, double alpha,
                                        const SweepDriver& driver) {
    if (betas.empty()) throw ConfigError("beta list is empty");
    for (const double b : betas) {
        if (!(b >= 0.0)) throw ConfigError("beta must be non-negative");
    }
    std::vector<ReportRow> rows;
    rows.reserve(betas.size());
    for (const double beta : betas) {
        const SweepOutcome outcome = driver(beta, alpha);
        rows.push_back({beta, alpha, outcome.metrics, outcome.flag});
    }
    return rows;
}

std::vector<ReportRow> alpha_ablation(std::span<const double> alphas, double beta,
                                      const SweepDriver& driver) {
    if (alphas.empty()) throw ConfigError("alpha list is empty");
    for (const double a : alphas) {
        if (!(a > 0.0) || a > 0.6) throw ConfigError("ablation alpha outside (0, 0.6]");
    }
    std::vector<ReportRow> rows;
    rows.reserve(alphas.size());
    for (const double alpha : alphas) {
        const SweepOutcome outcome = driver(beta, alpha);
        rows.push_back({beta, alpha, outcome.metrics, outcome.flag});
    }
    return rows;
}

}  // namespace nae
